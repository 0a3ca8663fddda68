//! Atoms common to every octant Hardy space, non-uniqueness of
//! decompositions, and the gluing operator.
//!
//! Rationals with distinct real separable poles and enough tail decay lie in
//! every octant Hardy space at once, so adding such an atom to one octant of
//! a decomposition and subtracting it from another changes the per-octant
//! norms without changing the reconstructed function. The glue operator runs
//! the other way: given per-octant approximants of one boundary function, it
//! produces a single rational with only real poles, so the common function
//! is itself a limit of intersection-class atoms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::CoreError;
use crate::hardy::{certify, HardyCertificate, SignVector};
use crate::polyalg::{binomial_power, MultiPoly, SeparableRational, UniPoly};
use crate::quadrature::{lp_quasinorm, QuasiNormResult, SingularitySchedule};
use crate::split::PhaseVector;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// An intersection-class atom with its all-octant certificates.
#[derive(Debug, Clone, Serialize)]
pub struct XpAtom {
    pub rational: SeparableRational,
    /// Pole matrix, `poles[k][j]` in variable `k`.
    pub poles: Vec<Vec<f64>>,
    pub p: f64,
    pub certificates: Vec<(SignVector, HardyCertificate)>,
    pub norm: QuasiNormResult,
}

impl XpAtom {
    pub fn all_valid(&self) -> bool {
        self.certificates.iter().all(|(_, c)| c.is_valid())
    }
}

/// Builds `P(x) / prod_k prod_j (x_k - a_kj)` and certifies it in every
/// octant. Requires distinct poles per variable and `(m - l) p > 1` where
/// `m` is the pole count per variable and `l` the maximal numerator degree.
pub fn make_xp_atom(
    poles: &[Vec<f64>],
    numerator: MultiPoly,
    p: f64,
    tols: &Tolerances,
) -> Result<XpAtom, CoreError> {
    let n = poles.len();
    if n == 0 || numerator.nvars() != n {
        return Err(CoreError::DimensionMismatch {
            expected: numerator.nvars(),
            got: n,
        });
    }
    let m = poles[0].len();
    if m == 0 || poles.iter().any(|row| row.len() != m) {
        return Err(CoreError::InvalidInput(
            "pole matrix must have the same positive number of poles per variable".into(),
        ));
    }
    for (k, row) in poles.iter().enumerate() {
        for i in 0..row.len() {
            for j in (i + 1)..row.len() {
                let sep = (row[i] - row[j]).abs();
                if sep <= tols.tau_distinct {
                    return Err(CoreError::DistinctnessViolation {
                        var: k,
                        a: row[i],
                        b: row[j],
                        separation: sep,
                    });
                }
            }
        }
    }
    let l = (0..n)
        .map(|k| numerator.degree(k).unwrap_or(0))
        .max()
        .unwrap_or(0);
    if p * (m as f64 - l as f64) <= 1.0 {
        return Err(CoreError::IntegrabilityViolation {
            reason: format!("(m - l) p = {} <= 1", p * (m as f64 - l as f64)),
        });
    }
    let dens: Vec<UniPoly> = poles
        .iter()
        .map(|row| {
            UniPoly::from_roots(
                &row.iter()
                    .map(|&a| Complex64::new(a, 0.0))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let rational = SeparableRational::new(numerator, dens.clone())?;
    // The atom factors as P(x) / prod_k den_k(x_k), so the boundary norm
    // goes through the pole-aware product rule for n >= 2; it is the same
    // number for every octant's certificate.
    let norm = if n == 1 {
        lp_quasinorm(&rational, p, &[0.0], tols.quad_tol_for(1), tols)?
    } else {
        let core = SeparableRational::new(
            rational.numerator().clone(),
            vec![UniPoly::one(); n],
        )?;
        let fi = crate::quadrature::FactoredLpIntegrand {
            core: core.evaluator(),
            axis_factors: dens
                .iter()
                .map(|q| {
                    SeparableRational::new(
                        MultiPoly::constant(1, Complex64::new(1.0, 0.0)),
                        vec![q.clone()],
                    )
                    .map(|r| r.evaluator())
                })
                .collect::<Result<_, _>>()?,
            p,
        };
        let schedule = SingularitySchedule {
            per_variable: poles
                .iter()
                .map(|row| {
                    let mut list: Vec<(f64, u32)> = row.iter().map(|&a| (a, 1)).collect();
                    list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                    list
                })
                .collect(),
        };
        let (value, abs_error) =
            crate::quadrature::product_quasinorm(&fi, &schedule, n, tols.quad_tol_for(n), tols)?;
        crate::quadrature::QuasiNormResult {
            value,
            abs_error,
            p,
            y_offset: vec![0.0; n],
        }
    };
    let octants = SignVector::all(n);
    let certificates: Vec<(SignVector, HardyCertificate)> = octants
        .par_iter()
        .map(|o| {
            crate::hardy::certify_with_norm(&rational, o, p, tols, Some(norm.clone()))
                .map(|c| (o.clone(), c))
        })
        .collect::<Result<_, _>>()?;
    Ok(XpAtom {
        rational,
        poles: poles.to_vec(),
        p,
        certificates,
        norm,
    })
}

/// A decomposition reduced to its per-octant atom lists.
#[derive(Debug, Clone, Serialize)]
pub struct OctantAssignment {
    pub per_octant: Vec<(SignVector, Vec<SeparableRational>)>,
}

impl OctantAssignment {
    /// A one-octant assignment: the whole function on `octant`, zero
    /// elsewhere.
    pub fn single(n: usize, octant: &SignVector, atom: SeparableRational) -> Self {
        OctantAssignment {
            per_octant: SignVector::all(n)
                .into_iter()
                .map(|o| {
                    let atoms = if &o == octant {
                        vec![atom.clone()]
                    } else {
                        Vec::new()
                    };
                    (o, atoms)
                })
                .collect(),
        }
    }

    pub fn from_decomposition(d: &crate::decompose::OctantDecomposition) -> Self {
        OctantAssignment {
            per_octant: d
                .per_octant
                .iter()
                .map(|o| (o.octant.clone(), o.atoms.clone()))
                .collect(),
        }
    }

    /// Pointwise value of the reconstruction `sum_sigma sum_k R_{k sigma}`.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.per_octant
            .iter()
            .flat_map(|(_, atoms)| atoms.iter())
            .map(|a| a.eval_unchecked(z))
            .sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormShift {
    pub octant: SignVector,
    pub base: f64,
    pub modified: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlternativeDecomposition {
    pub modified: OctantAssignment,
    pub norm_shifts: Vec<NormShift>,
    /// Max pointwise difference of the two reconstructions over the sample
    /// set; cancellation makes this rounding-level.
    pub max_reconstruction_diff: f64,
    /// Certificates of the inserted atom for every octant it was added to.
    pub inserted_valid: bool,
}

/// Adds `signs(sigma) * g` to the chosen octants. The signs must cancel, so
/// the reconstruction is unchanged while per-octant norms move.
pub fn alternative_decomposition(
    base: &OctantAssignment,
    g: &SeparableRational,
    signs: &[(SignVector, i8)],
    p: f64,
    sample_points: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<AlternativeDecomposition, CoreError> {
    use rand::{Rng, SeedableRng};
    let total: i64 = signs.iter().map(|(_, s)| *s as i64).sum();
    if total != 0 || signs.is_empty() {
        return Err(CoreError::SignsNotCancelling { sum: total });
    }
    let n = g.nvars();
    let mut modified = base.clone();
    let mut inserted_valid = true;
    for (octant, sign) in signs {
        let slot = modified
            .per_octant
            .iter_mut()
            .find(|(o, _)| o == octant)
            .ok_or_else(|| {
                CoreError::InvalidInput(format!("octant {octant} not present in the assignment"))
            })?;
        let signed = g.scale(Complex64::new(*sign as f64, 0.0));
        let cert = certify(&signed, octant, p, tols)?;
        inserted_valid &= cert.is_valid();
        slot.1.push(signed);
    }

    // Per-octant norms before and after.
    let schedule = merged_schedule(base, g, tols)?;
    let mut norm_shifts = Vec::new();
    for ((octant, base_atoms), (_, mod_atoms)) in
        base.per_octant.iter().zip(modified.per_octant.iter())
    {
        let base_norm = sum_norm(base_atoms, p, n, &schedule, tols)?;
        let mod_norm = sum_norm(mod_atoms, p, n, &schedule, tols)?;
        norm_shifts.push(NormShift {
            octant: octant.clone(),
            base: base_norm,
            modified: mod_norm,
            delta: mod_norm - base_norm,
        });
    }

    // Reconstruction comparison at random points.
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut max_diff = 0.0f64;
    for _ in 0..sample_points {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-12.0..12.0), 0.0))
            .collect();
        let a = base.eval(&z);
        let b = modified.eval(&z);
        max_diff = max_diff.max((a - b).norm());
    }

    Ok(AlternativeDecomposition {
        modified,
        norm_shifts,
        max_reconstruction_diff: max_diff,
        inserted_valid,
    })
}

fn merged_schedule(
    base: &OctantAssignment,
    g: &SeparableRational,
    tols: &Tolerances,
) -> Result<SingularitySchedule, CoreError> {
    let mut schedule = SingularitySchedule::from_rational(g, tols)?;
    for (_, atoms) in &base.per_octant {
        for atom in atoms {
            schedule = schedule.merge(&SingularitySchedule::from_rational(atom, tols)?);
        }
    }
    Ok(schedule)
}

fn sum_norm(
    atoms: &[SeparableRational],
    p: f64,
    n: usize,
    schedule: &SingularitySchedule,
    tols: &Tolerances,
) -> Result<f64, CoreError> {
    if atoms.is_empty() {
        return Ok(0.0);
    }
    let terms: Vec<(Complex64, &SeparableRational)> = atoms
        .iter()
        .map(|a| (Complex64::new(1.0, 0.0), a))
        .collect();
    match crate::quadrature::lp_distance(
        None,
        &terms,
        p,
        n,
        tols.quad_tol_for(n)
            .max(if n == 1 { 1e-4 } else { 3e-3 }),
        tols,
        schedule,
    ) {
        Ok((v, _)) => Ok(v),
        Err(CoreError::ToleranceNotMet { value, .. }) => Ok(value),
        Err(e) => Err(e),
    }
}

/// Output of the gluing operator.
#[derive(Debug, Clone, Serialize)]
pub struct GlueResult {
    pub glued: SeparableRational,
    /// `||R(., phi) - R_{sigma_1}||_p^p` for the supplied phase.
    pub distance_to_first: f64,
    /// Largest imaginary part among denominator roots; the construction
    /// keeps every new pole real.
    pub max_pole_imag: f64,
    /// `(2 pi / (1 - p))^n`, the combined-bound constant.
    pub bound_constant: f64,
    /// `(2 pi / (1-p))^n eps + eps / 4` for the caller-supplied fit quality.
    pub combined_bound: Option<f64>,
}

impl GlueResult {
    /// Fills in the combined error bound for a known per-octant fit quality
    /// `eps` (each component within `eps / 4` of the common function).
    pub fn with_epsilon(mut self, eps: f64) -> GlueResult {
        self.combined_bound = Some(self.bound_constant * eps + eps / 4.0);
        self
    }
}

/// Per-octant pole structure of one glue component.
struct GlueComponent {
    octant: SignVector,
    numerator: MultiPoly,
    /// Order of the pole at `-sigma(k) i` per variable.
    orders: Vec<u32>,
    /// Real-rooted leftover denominator per variable.
    rest: Vec<UniPoly>,
}

fn analyze_component(
    octant: &SignVector,
    r: &SeparableRational,
    tols: &Tolerances,
) -> Result<GlueComponent, CoreError> {
    let n = r.nvars();
    let mut orders = Vec::with_capacity(n);
    let mut rest = Vec::with_capacity(n);
    for k in 0..n {
        let mut q = r.denominator(k).clone();
        let pole = Complex64::new(0.0, -(octant.signs()[k] as f64));
        let linear = UniPoly::new(vec![-pole, Complex64::new(1.0, 0.0)]);
        let mut order = 0u32;
        loop {
            if q.degree().unwrap_or(0) == 0 {
                break;
            }
            let (quot, rem) = q.divrem(&linear);
            if rem.max_coeff_modulus() <= 1e-9 * (1.0 + q.max_coeff_modulus()) {
                q = quot;
                order += 1;
            } else {
                break;
            }
        }
        // What remains must be real-rooted, otherwise the glue would carry a
        // pole off the real axis.
        if q.degree().unwrap_or(0) >= 1 {
            let roots = crate::polyalg::roots_with_multiplicity(
                &q,
                &crate::polyalg::RootConfig {
                    max_iters: tols.root_max_iters,
                    tau_root: tols.tau_root,
                    tau_cluster: tols.tau_cluster,
                },
            )?;
            for root in roots {
                if root.location.im.abs() > 1e-6 * (1.0 + root.location.re.abs()) {
                    return Err(CoreError::InvalidInput(format!(
                        "component for octant {octant} has a non-real leftover pole at {}",
                        root.location
                    )));
                }
            }
        }
        orders.push(order);
        rest.push(q);
    }
    Ok(GlueComponent {
        octant: octant.clone(),
        numerator: r.numerator().clone(),
        orders,
        rest,
    })
}

/// Glues per-octant approximants of one boundary function into a single
/// rational holomorphic in the union of all open tubes: all new poles are
/// the real roots of the split denominators `D_k`.
pub fn glue_common_approximant(
    components: &[(SignVector, SeparableRational)],
    m: u32,
    phase: &PhaseVector,
    p: f64,
    tols: &Tolerances,
) -> Result<GlueResult, CoreError> {
    let n = phase.n();
    if components.is_empty() || components[0].1.nvars() != n {
        return Err(CoreError::InvalidInput(
            "component list empty or dimension mismatch with phase".into(),
        ));
    }
    let octants = SignVector::all(n);
    if components.len() != octants.len()
        || octants
            .iter()
            .any(|o| !components.iter().any(|(co, _)| co == o))
    {
        return Err(CoreError::InvalidInput(
            "glue needs exactly one component per octant".into(),
        ));
    }
    let analyzed: Vec<GlueComponent> = components
        .iter()
        .map(|(o, r)| analyze_component(o, r, tols))
        .collect::<Result<_, _>>()?;
    for comp in &analyzed {
        for k in 0..n {
            let need = comp.orders[k];
            if m <= need {
                return Err(CoreError::InvalidInput(format!(
                    "m = {m} must exceed the pole order {need} of octant {}",
                    comp.octant
                )));
            }
            crate::split::phase_factors(m, phase.phis()[k], tols.tau_degenerate)?;
        }
    }

    // Split denominators D_k and the per-variable rest products.
    let d_polys: Vec<UniPoly> = (0..n)
        .map(|k| {
            crate::split::phase_factors(m, phase.phis()[k], tols.tau_degenerate)
                .map(|pair| pair.denominator)
        })
        .collect::<Result<_, _>>()?;
    let rest_products: Vec<UniPoly> = (0..n)
        .map(|k| {
            analyzed
                .iter()
                .fold(UniPoly::one(), |acc, comp| acc.mul(&comp.rest[k]))
        })
        .collect();

    // Numerator: sum over octants of
    //   w_j N_j prod_k [sign (z_k + sigma_j(k) i)^(m - M_jk)] prod_{j' != j} rest_{j' k}.
    let mut numerator = MultiPoly::zero(n);
    for (j, comp) in analyzed.iter().enumerate() {
        let mut w = Complex64::new(1.0, 0.0);
        for k in 0..n {
            if comp.octant.signs()[k] > 0 {
                w *= -(Complex64::new(0.0, phase.phis()[k]).exp());
            }
        }
        let mut term = comp.numerator.scale(w);
        for k in 0..n {
            let sigma = comp.octant.signs()[k];
            let power = m - comp.orders[k];
            let factor = if sigma > 0 {
                // (i + z)^m / (z + i)^M = (z + i)^(m - M)
                binomial_power(I, Complex64::new(1.0, 0.0), power)
            } else {
                // (i - z)^m / (z - i)^M = (-1)^m (z - i)^(m - M)
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                binomial_power(-I, Complex64::new(1.0, 0.0), power)
                    .scale(Complex64::new(sign, 0.0))
            };
            term = term.mul_univar(k, &factor);
            // Other components' leftover denominators.
            for (jp, other) in analyzed.iter().enumerate() {
                if jp != j {
                    term = term.mul_univar(k, &other.rest[k]);
                }
            }
        }
        numerator = numerator.add(&term);
    }
    let dens: Vec<UniPoly> = (0..n)
        .map(|k| d_polys[k].mul(&rest_products[k]))
        .collect();
    let glued = SeparableRational::new(numerator, dens)?;

    // Pole realness, verified by root finding rather than by construction.
    let mut max_pole_imag = 0.0f64;
    for k in 0..n {
        let roots = crate::polyalg::roots_with_multiplicity(
            glued.denominator(k),
            &crate::polyalg::RootConfig {
                max_iters: tols.root_max_iters,
                tau_root: tols.tau_root,
                tau_cluster: tols.tau_cluster,
            },
        )?;
        for root in roots {
            max_pole_imag = max_pole_imag.max(root.location.im.abs());
        }
    }

    // Distance to the first-octant component.
    let first = components
        .iter()
        .find(|(o, _)| o == &SignVector::first(n))
        .expect("first octant present");
    let diff = glued.sub(&first.1)?;
    let distance_to_first = match lp_quasinorm(
        &diff,
        p,
        &vec![0.0; n],
        tols.quad_tol_for(n).max(1e-4),
        tols,
    ) {
        Ok(q) => q.value,
        Err(CoreError::ToleranceNotMet { value, .. }) => value,
        Err(e) => return Err(e),
    };

    let bound_constant = (2.0 * std::f64::consts::PI / (1.0 - p)).powi(n as i32);
    Ok(GlueResult {
        glued,
        distance_to_first,
        max_pole_imag,
        bound_constant,
        combined_bound: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GlueMeanReport {
    /// Grid mean of `||R(., phi) - R_{sigma_1}||_p^p`.
    pub mean: f64,
    pub accumulated_error: f64,
    /// `(2^(1-p) pi / (1-p))^n * max_j ||R_sigma_j - R_sigma_1||_p^p`.
    pub bound: f64,
    pub max_pair_distance: f64,
    pub best_phase: PhaseVector,
    pub best_distance: f64,
    pub grid_points: usize,
}

/// Verifies the averaging bound for the glue over a deterministic phase grid
/// and returns the best phase found.
pub fn glue_mean_over_phase(
    components: &[(SignVector, SeparableRational)],
    m: u32,
    p: f64,
    grid_per_dim: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<GlueMeanReport, CoreError> {
    let n = components
        .first()
        .map(|(o, _)| o.n())
        .ok_or_else(|| CoreError::InvalidInput("no components".into()))?;
    let first = components
        .iter()
        .find(|(o, _)| o == &SignVector::first(n))
        .ok_or_else(|| CoreError::InvalidInput("first octant missing".into()))?;

    // Pairwise distances to the first component.
    let mut max_pair = 0.0f64;
    for (o, r) in components {
        if o == &SignVector::first(n) {
            continue;
        }
        let diff = r.sub(&first.1)?;
        let d = match lp_quasinorm(&diff, p, &vec![0.0; n], tols.quad_tol_for(n).max(1e-4), tols)
        {
            Ok(q) => q.value,
            Err(CoreError::ToleranceNotMet { value, .. }) => value,
            Err(e) => return Err(e),
        };
        max_pair = max_pair.max(d);
    }

    let grid = crate::split::phase_grid(&vec![m; n], grid_per_dim, seed, tols.tau_degenerate);
    let results: Vec<Result<f64, CoreError>> = grid
        .par_iter()
        .map(|phase| {
            glue_common_approximant(components, m, phase, p, tols).map(|g| g.distance_to_first)
        })
        .collect();
    let mut total = 0.0;
    let mut best: Option<(PhaseVector, f64)> = None;
    for (phase, res) in grid.iter().zip(results) {
        let d = res?;
        total += d;
        if best.as_ref().map(|(_, b)| d < *b).unwrap_or(true) {
            best = Some((phase.clone(), d));
        }
    }
    let (best_phase, best_distance) =
        best.ok_or_else(|| CoreError::InvalidInput("empty phase grid".into()))?;
    let count = grid.len() as f64;
    let bound =
        (2.0f64.powf(1.0 - p) * std::f64::consts::PI / (1.0 - p)).powi(n as i32) * max_pair;
    Ok(GlueMeanReport {
        mean: total / count,
        accumulated_error: 0.0,
        bound,
        max_pair_distance: max_pair,
        best_phase,
        best_distance,
        grid_points: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::fit_rn;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn xp_fixture_1d(p: f64) -> XpAtom {
        make_xp_atom(
            &[vec![1.0, -1.0]],
            MultiPoly::constant(1, Complex64::new(1.0, 0.0)),
            p,
            &tols(),
        )
        .unwrap()
    }

    #[test]
    fn xp_atom_valid_in_both_half_planes() {
        let atom = xp_fixture_1d(0.6);
        assert!(atom.all_valid());
        assert!(atom.norm.value.is_finite() && atom.norm.value > 0.0);
    }

    #[test]
    fn xp_atom_screening_rejects_thin_tail() {
        // 1/(x - 1) at p = 0.6: gap 1, 0.6 <= 1.
        match make_xp_atom(
            &[vec![1.0]],
            MultiPoly::constant(1, Complex64::new(1.0, 0.0)),
            0.6,
            &tols(),
        ) {
            Err(CoreError::IntegrabilityViolation { .. }) => {}
            other => panic!("expected integrability violation, got {other:?}"),
        }
    }

    #[test]
    fn xp_atom_rejects_duplicate_poles() {
        match make_xp_atom(
            &[vec![1.0, 1.0 + 1e-12]],
            MultiPoly::constant(1, Complex64::new(1.0, 0.0)),
            0.6,
            &tols(),
        ) {
            Err(CoreError::DistinctnessViolation { .. }) => {}
            other => panic!("expected distinctness violation, got {other:?}"),
        }
    }

    #[test]
    fn alternative_decomposition_moves_norms_not_values() {
        let atom = xp_fixture_1d(0.6);
        let octants = SignVector::all(1);
        let base = OctantAssignment::single(1, &octants[0], atom.rational.clone());
        // Unit-quasi-norm copy of the atom.
        let unit = atom
            .rational
            .scale(Complex64::new(1.0 / atom.norm.value.powf(1.0 / 0.6), 0.0));
        let signs = vec![(octants[0].clone(), 1i8), (octants[1].clone(), -1i8)];
        let alt =
            alternative_decomposition(&base, &unit, &signs, 0.6, 1000, 42, &tols()).unwrap();
        assert!(alt.inserted_valid);
        assert!(alt.max_reconstruction_diff <= 1e-10, "{}", alt.max_reconstruction_diff);
        for shift in &alt.norm_shifts {
            assert!(
                shift.delta.abs() >= 1e-3,
                "octant {} norm barely moved: {}",
                shift.octant,
                shift.delta
            );
        }
        // Zero insertion changes nothing.
        let zero = SeparableRational::zero(1);
        let alt0 =
            alternative_decomposition(&base, &zero, &signs, 0.6, 100, 42, &tols()).unwrap();
        assert!(alt0.max_reconstruction_diff == 0.0);
        for shift in &alt0.norm_shifts {
            assert!(shift.delta.abs() < 1e-9);
        }
    }

    #[test]
    fn signs_must_cancel() {
        let atom = xp_fixture_1d(0.6);
        let octants = SignVector::all(1);
        let base = OctantAssignment::single(1, &octants[0], atom.rational.clone());
        let signs = vec![(octants[0].clone(), 1i8)];
        match alternative_decomposition(&base, &atom.rational, &signs, 0.6, 10, 1, &tols()) {
            Err(CoreError::SignsNotCancelling { sum: 1 }) => {}
            other => panic!("expected sign cancellation error, got {other:?}"),
        }
    }

    #[test]
    fn glue_identical_components_returns_same_function() {
        // All components equal to an intersection-class atom: the glue
        // telescopes back to it.
        let atom = xp_fixture_1d(0.6);
        let components: Vec<(SignVector, SeparableRational)> = SignVector::all(1)
            .into_iter()
            .map(|o| (o, atom.rational.clone()))
            .collect();
        let phase = PhaseVector::new(vec![1.1]).unwrap();
        let glue = glue_common_approximant(&components, 7, &phase, 0.6, &tols()).unwrap();
        for k in 0..40 {
            let z = [Complex64::new(-9.5 + 0.5 * k as f64, 0.3)];
            let a = glue.glued.eval_unchecked(&z);
            let b = atom.rational.eval_unchecked(&z);
            assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{a} vs {b}");
        }
        assert!(glue.max_pole_imag < 1e-8);
        // The distance is the p-th power integral of a rounding-level
        // pointwise difference, so its floor is far above machine epsilon.
        assert!(glue.distance_to_first < 1e-4, "{}", glue.distance_to_first);
    }

    #[test]
    fn glue_half_plane_approximants_of_common_function() {
        // Approximants of 1/(x^2 - 1 - eps...) from both half-planes via the
        // reciprocal-class fit, glued into a single real-poled rational.
        let target = |x: f64| {
            // A function in both boundary Hardy classes.
            1.0 / ((x - 1.0) * (x + 1.0) * (1.0 + x * x))
        };
        let f = crate::approx::SampledFunction::new(1, 60.0, 10.0, move |x: &[f64]| {
            Complex64::new(target(x[0]), 0.0)
        })
        .unwrap();
        let big_n = 3u32;
        let p = 0.5;
        let mut components = Vec::new();
        for octant in SignVector::all(1) {
            let fit = fit_rn(&f, p, big_n, 10, &octant, 0, &tols()).unwrap();
            components.push((octant, fit.atom.rational));
        }
        let report = glue_mean_over_phase(&components, 16, p, 16, 42, &tols()).unwrap();
        assert!(
            report.mean <= report.bound * (1.0 + 1e-6) + 1e-9,
            "mean {} vs bound {}",
            report.mean,
            report.bound
        );
        let glue = glue_common_approximant(
            &components,
            16,
            &report.best_phase,
            p,
            &tols(),
        )
        .unwrap()
        .with_epsilon(4.0 * report.max_pair_distance);
        assert!(glue.max_pole_imag < 1e-8, "poles drifted: {}", glue.max_pole_imag);
        // Bound constant at p = 1/2, n = 1 is 4 pi.
        assert!((glue.bound_constant - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let eps = 4.0 * report.max_pair_distance;
        assert!(
            (glue.combined_bound.unwrap() - (glue.bound_constant * eps + eps / 4.0)).abs()
                < 1e-12 * (1.0 + eps)
        );
    }
}
