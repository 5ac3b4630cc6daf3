//! Two-meson density matrices and the one-parameter scenario families.
//!
//! Basis ordering is `(K_L K_L, K_L K_S, K_S K_L, K_S K_S)` with
//! `K_L = (1, 0)` and `K_S = (0, 1)`. For B mesons substitute the two mass
//! eigenstates for `K_L`/`K_S`; nothing else changes.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HERMITIAN_TOL, NEGATIVE_EIGEN_TOL};

/// Trace tolerance accepted by [`DensityMatrix::new`].
pub const TRACE_TOL: f64 = 1e-10;

/// Tolerance on the sum of mixture weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Regenerated states whose raw trace moved by more than this are flagged as rescaled.
pub const RESCALE_TOL: f64 = 1e-12;

/// Regeneration amplitudes at or above this modulus lie outside the
/// experimentally accessible zone.
pub const ACCESSIBLE_F_LIMIT: f64 = 0.1;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `mat` and stores its exactly-Hermitian part.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:e} exceeds {HERMITIAN_TOL:e}"
            )));
        }
        let mat = mat.hermitian_part()?;
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let eig = hermitian_eig(&mat)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -NEGATIVE_EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat })
    }

    /// `I / n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Spectrum, sorted descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.mat)?.values)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.mat.get(i, j).norm_sqr();
            }
        }
        s
    }
}

/// Complex regeneration amplitude of a material slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegenerationParams {
    f: Complex64,
}

impl RegenerationParams {
    /// Accepts any finite `f` with `|f| <= 1`.
    pub fn new(f: Complex64) -> Result<Self> {
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "f",
                reason: "must be finite".into(),
            });
        }
        if f.norm() > 1.0 {
            return Err(Error::InvalidParameter {
                name: "f",
                reason: format!("|f| = {} exceeds 1", f.norm()),
            });
        }
        Ok(Self { f })
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(modulus, phase))
    }

    pub fn f(&self) -> Complex64 {
        self.f
    }

    pub fn is_accessible(&self) -> bool {
        self.f.norm() < ACCESSIBLE_F_LIMIT
    }
}

/// Decoherence rate `l`; the characteristic time is `τ = 1/l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceParams {
    rate: f64,
}

impl DecoherenceParams {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter {
                name: "l",
                reason: format!("decoherence rate must be finite and > 0, got {rate}"),
            });
        }
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.rate
    }
}

/// The antisymmetric two-meson singlet `(|K_L K_S⟩ − |K_S K_L⟩)/√2` as a density matrix.
pub fn singlet() -> DensityMatrix {
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    m[5] = Complex64::new(0.5, 0.0);
    m[6] = Complex64::new(-0.5, 0.0);
    m[9] = Complex64::new(-0.5, 0.0);
    m[10] = Complex64::new(0.5, 0.0);
    DensityMatrix {
        mat: ComplexMatrix::from_vec(4, m).expect("static 4x4 matrix"),
    }
}

/// Slab regeneration operator acting on the second meson:
/// `1/√(1+|f|²) · diag(B, B)` with `B = [[1, f], [f, 1]]`.
///
/// Note `f` is not conjugated, so the operator is unitary only for purely
/// imaginary `f`.
pub fn regeneration_operator(p: &RegenerationParams) -> ComplexMatrix {
    let f = p.f;
    let norm = 1.0 / (1.0 + f.norm_sqr()).sqrt();
    let one = Complex64::new(norm, 0.0);
    let off = f * norm;
    let zero = Complex64::new(0.0, 0.0);
    let rows = vec![
        vec![one, off, zero, zero],
        vec![off, one, zero, zero],
        vec![zero, zero, one, off],
        vec![zero, zero, off, one],
    ];
    ComplexMatrix::from_rows(&rows).expect("finite 4x4 matrix")
}

/// Outcome of [`regenerate_detailed`].
#[derive(Debug, Clone)]
pub struct Regenerated {
    pub state: DensityMatrix,
    /// `Tr(U ρ U†)` before renormalization.
    pub raw_trace: f64,
    /// Whether renormalization changed the state beyond [`RESCALE_TOL`].
    pub rescaled: bool,
}

/// `U ρ U† / Tr(U ρ U†)`.
pub fn regenerate(rho: &DensityMatrix, p: &RegenerationParams) -> Result<DensityMatrix> {
    Ok(regenerate_detailed(rho, p)?.state)
}

pub fn regenerate_detailed(rho: &DensityMatrix, p: &RegenerationParams) -> Result<Regenerated> {
    require_two_mesons(rho)?;
    let u = regeneration_operator(p);
    let out = u.matmul(&rho.mat)?.matmul(&u.adjoint())?;
    let raw_trace = out.trace().re;
    if raw_trace < 1e-12 {
        return Err(Error::DegenerateTrace { trace: raw_trace });
    }
    let state = DensityMatrix::new(out.scale(1.0 / raw_trace))?;
    Ok(Regenerated {
        state,
        raw_trace,
        rescaled: (raw_trace - 1.0).abs() > RESCALE_TOL,
    })
}

/// Singlet with its coherences damped by `e^{-l t}`.
pub fn decohered_singlet(t: f64, d: &DecoherenceParams) -> Result<DensityMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::OutOfDomain {
            param: "t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let coherence = -0.5 * (-d.rate * t).exp();
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    m[5] = Complex64::new(0.5, 0.0);
    m[6] = Complex64::new(coherence, 0.0);
    m[9] = Complex64::new(coherence, 0.0);
    m[10] = Complex64::new(0.5, 0.0);
    DensityMatrix::new(ComplexMatrix::from_vec(4, m)?)
}

/// Convex combination `Σ w_i ρ_i`.
pub fn mix(components: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let Some(&(_, first)) = components.first() else {
        return Err(Error::InvalidParameter {
            name: "components",
            reason: "mixture needs at least one component".into(),
        });
    };
    let mut sum = 0.0;
    let mut acc = ComplexMatrix::zeros(first.dim());
    for &(w, state) in components {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "weight",
                reason: format!("mixture weights must be finite and >= 0, got {w}"),
            });
        }
        sum += w;
        acc = acc.add(&state.mat.scale(w))?;
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSum { sum });
    }
    DensityMatrix::new(acc)
}

/// `x ρ + (1 − x) I/n`.
pub fn depolarize(rho: &DensityMatrix, x: f64) -> Result<DensityMatrix> {
    check_unit_interval("x", x)?;
    let noise = DensityMatrix::maximally_mixed(rho.dim());
    mix(&[(x, rho), (1.0 - x, &noise)])
}

fn require_two_mesons(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(crate::linalg::LinalgError::DimensionMismatch {
            left: 4,
            right: rho.dim(),
        }
        .into());
    }
    Ok(())
}

fn check_unit_interval(param: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfDomain {
            param,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Scenario catalogue, addressed by stable string tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Decohered singlet against the singlet, swept in time.
    Decohered,
    /// Decohered singlet with a white background fraction, swept in time.
    #[serde(rename = "decohered-bg")]
    DecoheredBackground,
    /// `x ρ_S + (1 − x) U ρ_S U†` against the singlet.
    SingletRegenMix,
    /// `x U(f1) ρ_S U(f1)† + (1 − x) U(f2) ρ_S U(f2)†` against `U(f1) ρ_S U(f1)†`.
    TwoSlabMix,
    /// `x ρ_S + (1 − x) I/4` against the singlet.
    Depolarized,
    /// `x U ρ_S U† + (1 − x) I/4` against `U ρ_S U†`.
    RegenDepolarized,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::Decohered,
        FamilyKind::DecoheredBackground,
        FamilyKind::SingletRegenMix,
        FamilyKind::TwoSlabMix,
        FamilyKind::Depolarized,
        FamilyKind::RegenDepolarized,
    ];

    pub fn token(self) -> &'static str {
        match self {
            FamilyKind::Decohered => "decohered",
            FamilyKind::DecoheredBackground => "decohered-bg",
            FamilyKind::SingletRegenMix => "singlet-regen-mix",
            FamilyKind::TwoSlabMix => "two-slab-mix",
            FamilyKind::Depolarized => "depolarized",
            FamilyKind::RegenDepolarized => "regen-depolarized",
        }
    }

    /// The swept parameter for this scenario.
    pub fn parameter(self) -> SweepParam {
        match self {
            FamilyKind::Decohered | FamilyKind::DecoheredBackground => SweepParam::Time,
            _ => SweepParam::Mixing,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "scenario",
                token: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    /// Elapsed time `t`.
    #[serde(rename = "t")]
    Time,
    /// Mixing fraction `x`.
    #[serde(rename = "x")]
    Mixing,
}

impl SweepParam {
    pub fn token(self) -> &'static str {
        match self {
            SweepParam::Time => "t",
            SweepParam::Mixing => "x",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" => Ok(SweepParam::Time),
            "x" => Ok(SweepParam::Mixing),
            _ => Err(Error::UnknownToken {
                what: "parameter",
                token: s.to_string(),
            }),
        }
    }
}

/// Fixed parameters of a scenario. Only the ones the kind uses are read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub l: Option<f64>,
    pub bg: Option<f64>,
    pub f: Option<Complex64>,
    pub f1: Option<Complex64>,
    pub f2: Option<Complex64>,
}

/// Decohered time span covered by default, in units of `τ`.
pub const DEFAULT_TIME_SPAN_TAUS: f64 = 10.0;

#[derive(Debug, Clone)]
enum Curve {
    Decohered {
        decoherence: DecoherenceParams,
        background: f64,
    },
    /// `x · at_one + (1 − x) · at_zero`.
    Mixture {
        at_one: DensityMatrix,
        at_zero: DensityMatrix,
    },
}

/// A named curve `θ ↦ ρ(θ)` together with the reference state distances are
/// measured from.
#[derive(Debug, Clone)]
pub struct StateFamily {
    kind: FamilyKind,
    params: FamilyParams,
    domain: (f64, f64),
    reference: DensityMatrix,
    curve: Curve,
    warnings: Vec<String>,
}

impl StateFamily {
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn parameter(&self) -> SweepParam {
        self.kind.parameter()
    }

    /// Closed interval of admissible `θ`.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn reference(&self) -> &DensityMatrix {
        &self.reference
    }

    /// Notes about parameters outside the experimentally accessible zone.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Short human-readable description, e.g. `two-slab-mix(f1=0.05, f2=0.001)`.
    pub fn descriptor(&self) -> String {
        let p = &self.params;
        let mut parts = Vec::new();
        let cplx = |z: Complex64| {
            if z.im == 0.0 {
                format!("{}", z.re)
            } else {
                format!("{}{:+}i", z.re, z.im)
            }
        };
        if let Some(l) = p.l {
            parts.push(format!("l={l}"));
        }
        if let Some(bg) = p.bg {
            parts.push(format!("bg={bg}"));
        }
        if let Some(f) = p.f {
            parts.push(format!("f={}", cplx(f)));
        }
        if let Some(f) = p.f1 {
            parts.push(format!("f1={}", cplx(f)));
        }
        if let Some(f) = p.f2 {
            parts.push(format!("f2={}", cplx(f)));
        }
        if parts.is_empty() {
            self.kind.to_string()
        } else {
            format!("{}({})", self.kind, parts.join(", "))
        }
    }

    pub fn check_domain(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(theta.is_finite() && lo <= theta && theta <= hi) {
            return Err(Error::OutOfDomain {
                param: self.parameter().token(),
                value: theta,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// The state at parameter value `theta`.
    pub fn state_at(&self, theta: f64) -> Result<DensityMatrix> {
        self.check_domain(theta)?;
        match &self.curve {
            Curve::Decohered {
                decoherence,
                background,
            } => {
                let sigma = decohered_singlet(theta, decoherence)?;
                if *background == 0.0 {
                    Ok(sigma)
                } else {
                    let noise = DensityMatrix::maximally_mixed(4);
                    mix(&[(1.0 - background, &sigma), (*background, &noise)])
                }
            }
            Curve::Mixture { at_one, at_zero } => mix(&[(theta, at_one), (1.0 - theta, at_zero)]),
        }
    }
}

/// Builds the scenario `kind` from its fixed parameters.
pub fn make_family(kind: FamilyKind, params: &FamilyParams) -> Result<StateFamily> {
    let need = |v: Option<Complex64>, name: &'static str| {
        v.ok_or_else(|| Error::MissingParameter {
            kind: kind.token().to_string(),
            name,
        })
    };
    let mut warnings = Vec::new();
    let mut regen = |v: Option<Complex64>, name: &'static str| -> Result<RegenerationParams> {
        let p = RegenerationParams::new(need(v, name)?).map_err(|e| match e {
            Error::InvalidParameter { reason, .. } => Error::InvalidParameter { name, reason },
            other => other,
        })?;
        if !p.is_accessible() {
            warnings.push(format!(
                "|{name}| = {} is outside the experimentally accessible zone |{name}| < {ACCESSIBLE_F_LIMIT}",
                p.f.norm()
            ));
        }
        Ok(p)
    };

    let rho_s = singlet();
    let mut fixed = FamilyParams::default();
    let (reference, curve, domain) = match kind {
        FamilyKind::Decohered | FamilyKind::DecoheredBackground => {
            let l = params.l.ok_or_else(|| Error::MissingParameter {
                kind: kind.token().to_string(),
                name: "l",
            })?;
            let decoherence = DecoherenceParams::new(l)?;
            fixed.l = Some(l);
            let background = if kind == FamilyKind::DecoheredBackground {
                let bg = params.bg.ok_or_else(|| Error::MissingParameter {
                    kind: kind.token().to_string(),
                    name: "bg",
                })?;
                check_unit_interval("bg", bg)?;
                fixed.bg = Some(bg);
                bg
            } else {
                0.0
            };
            let domain = (0.0, DEFAULT_TIME_SPAN_TAUS * decoherence.tau());
            (
                rho_s,
                Curve::Decohered {
                    decoherence,
                    background,
                },
                domain,
            )
        }
        FamilyKind::SingletRegenMix => {
            let p = regen(params.f, "f")?;
            fixed.f = Some(p.f);
            let regenerated = regenerate(&rho_s, &p)?;
            let curve = Curve::Mixture {
                at_one: rho_s.clone(),
                at_zero: regenerated,
            };
            (rho_s, curve, (0.0, 1.0))
        }
        FamilyKind::TwoSlabMix => {
            let p1 = regen(params.f1, "f1")?;
            let p2 = regen(params.f2, "f2")?;
            fixed.f1 = Some(p1.f);
            fixed.f2 = Some(p2.f);
            let first = regenerate(&rho_s, &p1)?;
            let second = regenerate(&rho_s, &p2)?;
            let curve = Curve::Mixture {
                at_one: first.clone(),
                at_zero: second,
            };
            (first, curve, (0.0, 1.0))
        }
        FamilyKind::Depolarized => {
            let curve = Curve::Mixture {
                at_one: rho_s.clone(),
                at_zero: DensityMatrix::maximally_mixed(4),
            };
            (rho_s, curve, (0.0, 1.0))
        }
        FamilyKind::RegenDepolarized => {
            let p = regen(params.f, "f")?;
            fixed.f = Some(p.f);
            let regenerated = regenerate(&rho_s, &p)?;
            let curve = Curve::Mixture {
                at_one: regenerated.clone(),
                at_zero: DensityMatrix::maximally_mixed(4),
            };
            (regenerated, curve, (0.0, 1.0))
        }
    };

    Ok(StateFamily {
        kind,
        params: fixed,
        domain,
        reference,
        curve,
        warnings,
    })
}
