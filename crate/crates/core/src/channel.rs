//! Single-qubit channels simulable with a single-qubit mixed ancilla.
//!
//! The joint unitary acts on system ⊗ ancilla (system is the first tensor
//! factor) and is fixed by three angles (α, β, δ); the ancilla is
//! (1 − λ)I/2 + λ|φ⟩⟨φ| with |φ⟩ = cos(ξ/2)|0⟩ + e^{−iη} sin(ξ/2)|1⟩.
//! Together they give a six-parameter family of affine qubit maps.
//!
//! Channel equality is decided on Choi matrices, since Kraus sets are only
//! defined up to a unitary mixing.

use crate::error::{check_param, Error, Result};
use crate::linalg::{eig_hermitian, kron, partial_trace, pauli, ComplexMatrix, C64, I, ONE, ZERO};
use crate::master::AffineChannel;
use crate::thermo::{bloch_components, validate_density, BlochVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub eta: f64,
    pub xi: f64,
    pub lambda: f64,
}

impl ChannelParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, eta: f64, xi: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            delta,
            eta,
            xi,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_param(
            "lambda",
            self.lambda,
            (0.0..=1.0).contains(&self.lambda),
            "must lie in [0, 1]",
        )?;
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
            ("eta", self.eta),
            ("xi", self.xi),
        ] {
            check_param(name, v, v.is_finite(), "angle must be finite")?;
        }
        Ok(())
    }

    pub fn ancilla(&self) -> AncillaState {
        AncillaState {
            lambda: self.lambda,
            xi: self.xi,
            eta: self.eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaState {
    pub lambda: f64,
    pub xi: f64,
    pub eta: f64,
}

/// (1 − λ)I/2 + λ|φ⟩⟨φ|
pub fn ancilla_density(a: &AncillaState) -> Result<ComplexMatrix> {
    check_param(
        "lambda",
        a.lambda,
        (0.0..=1.0).contains(&a.lambda),
        "must lie in [0, 1]",
    )?;
    let phi = [
        C64::new((a.xi / 2.0).cos(), 0.0),
        C64::from_polar((a.xi / 2.0).sin(), -a.eta),
    ];
    let mixed = ComplexMatrix::identity(2).scale_real((1.0 - a.lambda) / 2.0);
    Ok(&mixed + &ComplexMatrix::projector(&phi).scale_real(a.lambda))
}

/// The joint unitary in block form (computational basis of system ⊗ ancilla).
pub fn parametrized_unitary(p: &ChannelParams) -> ComplexMatrix {
    let sum = (p.alpha + p.delta) / 2.0;
    let diff = (p.alpha - p.delta) / 2.0;
    let phase = C64::from_polar(1.0, -p.beta);
    let c_sum = C64::new(sum.cos(), 0.0);
    let is_sum = I * sum.sin();
    let c_diff = phase * diff.cos();
    let is_diff = phase * I * diff.sin();
    ComplexMatrix::from_rows([
        [c_sum, ZERO, ZERO, is_sum],
        [ZERO, c_diff, is_diff, ZERO],
        [ZERO, is_diff, c_diff, ZERO],
        [is_sum, ZERO, ZERO, c_sum],
    ])
}

/// The same unitary written as K₀ I⊗I + K₁ σ₁⊗σ₁ + K₂ σ₂⊗σ₂ + K₃ σ₃⊗σ₃.
pub fn parametrized_unitary_pauli(p: &ChannelParams) -> ComplexMatrix {
    let sum = (p.alpha + p.delta) / 2.0;
    let diff = (p.alpha - p.delta) / 2.0;
    let phase = C64::from_polar(1.0, -p.beta);
    let k0 = (C64::new(sum.cos(), 0.0) + phase * diff.cos()) * 0.5;
    let k1 = (C64::new(sum.sin(), 0.0) + phase * diff.sin()) * (I * 0.5);
    let k2 = (C64::new(sum.sin(), 0.0) - phase * diff.sin()) * (-I * 0.5);
    let k3 = (C64::new(sum.cos(), 0.0) - phase * diff.cos()) * 0.5;
    let [x, y, z] = pauli::xyz();
    let terms = [
        kron(&pauli::identity(), &pauli::identity()).scale(k0),
        kron(&x, &x).scale(k1),
        kron(&y, &y).scale(k2),
        kron(&z, &z).scale(k3),
    ];
    terms
        .iter()
        .fold(ComplexMatrix::zeros(4, 4), |acc, t| &acc + t)
}

/// Closed-form affine pair (M, C) of the channel induced by the joint
/// unitary and ancilla.
///
/// M₃₁ carries a `+` sign: direct reconstruction through
/// [`channel_from_unitary`] gives +λ cosα sinδ sinη sinξ there.
pub fn affine_from_params(p: &ChannelParams) -> AffineChannel {
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let (sd, cd) = p.delta.sin_cos();
    let (se, ce) = p.eta.sin_cos();
    let (sx, cx) = p.xi.sin_cos();
    let l = p.lambda;
    AffineChannel {
        m: [
            [cd * cb, l * cd * sb * cx, -l * sd * cb * se * sx],
            [-l * ca * sb * cx, ca * cb, l * sa * cb * ce * sx],
            [l * ca * sd * se * sx, -l * sa * cd * sx * ce, ca * cd],
        ],
        c: [
            -l * sd * sb * sx * ce,
            -l * sa * sb * sx * se,
            -l * sa * sd * cx,
        ],
    }
}

/// Tr_e[U (ρ_s ⊗ ρ_e) U†]
pub fn evolve_system(
    u: &ComplexMatrix,
    rho_s: &ComplexMatrix,
    rho_e: &ComplexMatrix,
) -> ComplexMatrix {
    let joint = kron(rho_s, rho_e).conjugate_by(u);
    partial_trace(&joint, &[2, 2], &[0]).expect("4x4 joint state")
}

/// Tr_s[U (ρ_s ⊗ ρ_e) U†]; the ancilla is not left unchanged by the interaction.
pub fn ancilla_after(
    u: &ComplexMatrix,
    rho_s: &ComplexMatrix,
    rho_e: &ComplexMatrix,
) -> ComplexMatrix {
    let joint = kron(rho_s, rho_e).conjugate_by(u);
    partial_trace(&joint, &[2, 2], &[1]).expect("4x4 joint state")
}

/// A channel reconstructed from a joint unitary and an ancilla state.
#[derive(Debug, Clone)]
pub struct SimulatedChannel {
    pub affine: AffineChannel,
    pub kraus: Vec<ComplexMatrix>,
}

impl SimulatedChannel {
    pub fn choi(&self) -> ChoiMatrix {
        choi_of(&KrausSet(self.kraus.clone()))
    }
}

/// Reads off (M, C) by sending the Bloch basis {0, e₁, e₂, e₃} through the
/// map ρ ↦ Tr_e[U(ρ ⊗ ρ_e)U†]; Kraus operators come from the Choi spectrum.
pub fn channel_from_unitary(
    u: &ComplexMatrix,
    ancilla: &ComplexMatrix,
) -> Result<SimulatedChannel> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch("joint unitary must be 4x4".into()));
    }
    let deviation = u.unitary_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    if ancilla.rows() != 2 || ancilla.cols() != 2 {
        return Err(Error::DimensionMismatch("ancilla must be a qubit".into()));
    }
    validate_density(ancilla)?;

    let map = |x: &ComplexMatrix| evolve_system(u, x, ancilla);
    let c = bloch_components(&map(&pauli::identity().scale_real(0.5))).to_array();
    let mut m = [[0.0; 3]; 3];
    for (j, sigma) in pauli::xyz().iter().enumerate() {
        let input = (&pauli::identity() + sigma).scale_real(0.5);
        let out = bloch_components(&map(&input)).to_array();
        for i in 0..3 {
            m[i][j] = out[i] - c[i];
        }
    }
    let affine = AffineChannel { m, c };
    let choi = choi_of_map(map);
    let kraus = kraus_from_choi(&choi)?;
    Ok(SimulatedChannel { affine, kraus })
}

/// Normalized Choi matrix (Λ ⊗ id)(|φ⁺⟩⟨φ⁺|) = ½ Σᵢⱼ Λ(|i⟩⟨j|) ⊗ |i⟩⟨j|.
///
/// The output factor comes first. The identity channel maps to |φ⁺⟩⟨φ⁺|, the
/// trace is 1 and tracing out the output leaves I/2 for trace-preserving maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix(pub ComplexMatrix);

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.0.is_psd(tol)
    }

    /// Tr_out(J) = I/2 within `tol`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        partial_trace(&self.0, &[2, 2], &[1])
            .map(|r| r.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) <= tol)
            .unwrap_or(false)
    }

    pub fn rank(&self, tol: f64) -> usize {
        eig_hermitian(&self.0)
            .map(|e| e.eigenvalues.iter().filter(|l| l.abs() > tol).count())
            .unwrap_or(0)
    }
}

/// Anything that acts linearly on 2×2 operators.
pub trait QubitChannel {
    fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix;
}

impl QubitChannel for AffineChannel {
    fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.map_operator(x)
    }
}

/// Kraus representation ρ ↦ Σ K ρ K†.
#[derive(Debug, Clone)]
pub struct KrausSet(pub Vec<ComplexMatrix>);

impl KrausSet {
    /// max |Σ K†K − I|
    pub fn completeness_error(&self) -> f64 {
        let n = self.0.first().map_or(2, |k| k.cols());
        self.0
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, k| {
                &acc + &k.dagger().matmul(k)
            })
            .max_abs_diff(&ComplexMatrix::identity(n))
    }
}

impl QubitChannel for KrausSet {
    fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        crate::thermo::apply_kraus(&self.0, x)
    }
}

pub fn choi_of<C: QubitChannel + ?Sized>(ch: &C) -> ChoiMatrix {
    choi_of_map(|x| ch.apply_operator(x))
}

pub fn choi_of_map(map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ChoiMatrix {
    let mut choi = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2, 2);
            unit[(i, j)] = ONE;
            choi = &choi + &kron(&map(&unit), &unit);
        }
    }
    ChoiMatrix(choi.scale_real(0.5))
}

/// Max-abs-entry Choi distance ≤ tol.
pub fn channels_equal<A, B>(a: &A, b: &B, tol: f64) -> bool
where
    A: QubitChannel + ?Sized,
    B: QubitChannel + ?Sized,
{
    choi_of(a).distance(&choi_of(b)) <= tol
}

/// Kraus operators Kₖ[a][i] = √(2λₖ) vₖ[2a + i] from the Choi eigenpairs.
pub fn kraus_from_choi(choi: &ChoiMatrix) -> Result<Vec<ComplexMatrix>> {
    let eig = eig_hermitian(&choi.0)?;
    let mut out = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate().rev() {
        if lambda <= 1e-14 {
            continue;
        }
        let w = (2.0 * lambda).sqrt();
        let v = eig.eigenvectors.column(k);
        out.push(ComplexMatrix::from_vec(
            2,
            2,
            v.iter().map(|&x| x * w).collect(),
        ));
    }
    Ok(out)
}

/// Bloch vector of a valid qubit density matrix (convenience for callers
/// working with ancilla states).
pub fn ancilla_bloch(a: &AncillaState) -> Result<BlochVector> {
    Ok(bloch_components(&ancilla_density(a)?))
}
