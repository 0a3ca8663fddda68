//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers and enforcing its runtime budget. Run with
//! `cargo test --test acceptance -- --nocapture` to see the summary lines.

use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use hardy_tubes::approx::SampledFunction;
use hardy_tubes::config::Tolerances;
use hardy_tubes::decompose::{decompose, DecomposeConfig};
use hardy_tubes::density::fit_rn;
use hardy_tubes::hardy::{certify, interior_sup_check, SignVector};
use hardy_tubes::intersect::{alternative_decomposition, make_xp_atom, OctantAssignment};
use hardy_tubes::polyalg::{binomial_power, MultiIndex, MultiPoly, SeparableRational, UniPoly};
use hardy_tubes::quadrature::{lp_quasinorm, norm_slice_profile};
use hardy_tubes::special::gamma;
use hardy_tubes::split::{
    c_np, mean_over_phase, phase_factors, select_phase, split_atom, PhaseVector, SplitParams,
};

/// Criteria run one at a time so the wall-clock budgets are meaningful.
fn lock() -> std::sync::MutexGuard<'static, ()> {
    static GUARD: Mutex<()> = Mutex::new(());
    GUARD.lock().unwrap_or_else(|e| e.into_inner())
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_plus_x2_pow(l: u32) -> UniPoly {
    UniPoly::new(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]).pow(l)
}

fn report_line(id: u32, name: &str, elapsed: Duration, detail: &str) {
    println!(
        "criterion {id:2} ({name}): PASS in {:.2}s -- {detail}",
        elapsed.as_secs_f64()
    );
}

fn budget(id: u32, elapsed: Duration, limit_s: f64) {
    assert!(
        elapsed.as_secs_f64() < limit_s,
        "criterion {id} exceeded its runtime budget: {:.1}s >= {limit_s}s",
        elapsed.as_secs_f64()
    );
}

// -------------------------------------------------------------------------
// 1. Partition of unity.
// -------------------------------------------------------------------------
#[test]
fn criterion_01_partition_of_unity() {
    let _guard = lock();
    let t0 = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(42);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 100 {
        let m: u32 = rng.random_range(2..=8);
        let phi: f64 = rng.random_range(-3.1..3.1);
        let pair = match phase_factors(m, phi, 1e-6) {
            Ok(p) => p,
            Err(_) => continue, // degenerate phase: redraw
        };
        // Near-real points included: |Im z| down to 0.01.
        let sign = if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
        let z = c64(
            rng.random_range(-5.0..5.0),
            sign * rng.random_range(0.01..5.0),
        );
        let sum = pair.plus.eval_unchecked(&[z]) + pair.minus.eval_unchecked(&[z]);
        worst = worst.max((sum - c64(1.0, 0.0)).norm());
        count += 1;
    }
    assert!(worst <= 1e-12, "max |F+ + F- - 1| = {worst:e}");
    let elapsed = t0.elapsed();
    budget(1, elapsed, 1.0);
    report_line(1, "partition of unity", elapsed, &format!("max deviation {worst:.3e}"));
}

// -------------------------------------------------------------------------
// 2. Split reconstruction on random class-A atoms.
// -------------------------------------------------------------------------

/// The split fixtures and their serialized reports; reused by criterion 10.
fn run_criterion_2() -> (String, f64) {
    let mut tols = Tolerances::fast();
    tols.quad_rel_tol = [1e-3, 1e-2, 1e-2];
    let mut rng = rand::rngs::StdRng::seed_from_u64(42);
    let mut worst = 0.0f64;
    let mut reports = Vec::new();
    for i in 0..20 {
        let n = 1 + (i % 2);
        let p = 0.5;
        let mut num = MultiPoly::zero(n);
        let mut l = Vec::new();
        let mut degs = Vec::new();
        for _ in 0..n {
            let lk: u32 = rng.random_range(2..=4);
            l.push(lk);
            degs.push(rng.random_range(0..=(2 * lk - 3)));
        }
        // Dense random numerator within the degree box.
        let mut idx = vec![0u32; n];
        loop {
            num.add_term(
                MultiIndex(idx.clone()),
                c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] <= degs[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == n {
                    break;
                }
            }
            if k == n {
                break;
            }
        }
        let dens: Vec<UniPoly> = l.iter().map(|&lk| one_plus_x2_pow(lk)).collect();
        let atom = SeparableRational::new(num, dens).unwrap();
        let m = SplitParams::default_m(&l, n);
        let phis: Vec<f64> = (0..n).map(|_| rng.random_range(-2.9..2.9)).collect();
        let params = SplitParams::new(m, PhaseVector::new(phis).unwrap()).unwrap();
        let split = split_atom(&atom, p, &params, &tols).unwrap();
        for _ in 0..1000 {
            let x: Vec<Complex64> = (0..n)
                .map(|_| c64(rng.random_range(-20.0..20.0), 0.0))
                .collect();
            let want = atom.eval_unchecked(&x);
            let got: Complex64 = split
                .components
                .iter()
                .map(|(_, comp)| comp.eval_unchecked(&x))
                .sum();
            worst = worst.max((got - want).norm() / (1.0 + want.norm()));
        }
        reports.push(split);
    }
    (
        serde_json::to_string(&reports).expect("serializable"),
        worst,
    )
}

fn criterion2_cache() -> &'static (String, f64) {
    static CACHE: OnceLock<(String, f64)> = OnceLock::new();
    CACHE.get_or_init(run_criterion_2)
}

#[test]
fn criterion_02_split_reconstruction() {
    let _guard = lock();
    let t0 = Instant::now();
    let (_, worst) = criterion2_cache().clone();
    assert!(worst <= 1e-9, "max relative reconstruction error {worst:e}");
    let elapsed = t0.elapsed();
    budget(2, elapsed, 30.0);
    report_line(
        2,
        "split reconstruction",
        elapsed,
        &format!("20 atoms, max rel deviation {worst:.3e}"),
    );
}

// -------------------------------------------------------------------------
// 3. Quadrature oracles.
// -------------------------------------------------------------------------
#[test]
fn criterion_03_quadrature_oracle() {
    let _guard = lock();
    let t0 = Instant::now();
    let tols = Tolerances::default();

    let smooth = SeparableRational::new(
        MultiPoly::constant(1, c64(1.0, 0.0)),
        vec![one_plus_x2_pow(3)],
    )
    .unwrap();
    let r1 = lp_quasinorm(&smooth, 0.5, &[0.0], 1e-8, &tols).unwrap();
    assert!(
        (r1.value - 2.0).abs() <= 1e-6,
        "smooth fixture: {} vs 2",
        r1.value
    );

    // Real-pole fixture 1/(x (1 + x^2)) against the closed form
    // Gamma(1/4)^2 / Gamma(1/2).
    let q = UniPoly::new(vec![c64(0.0, 0.0), c64(1.0, 0.0)]).mul(&one_plus_x2_pow(1));
    let singular =
        SeparableRational::new(MultiPoly::constant(1, c64(1.0, 0.0)), vec![q]).unwrap();
    let expect = gamma(0.25).powi(2) / gamma(0.5);
    assert!((expect - 7.416_298_709_205_487).abs() < 1e-9);
    let r2 = lp_quasinorm(&singular, 0.5, &[0.0], 1e-6, &tols).unwrap();
    assert!(
        (r2.value - expect).abs() <= 1e-5 * expect,
        "pole fixture: {} vs {expect}",
        r2.value
    );
    let elapsed = t0.elapsed();
    budget(3, elapsed, 5.0);
    report_line(
        3,
        "quadrature oracle",
        elapsed,
        &format!("lorentzian {:.9}, beta-integral {:.7}", r1.value, r2.value),
    );
}

// -------------------------------------------------------------------------
// 4. Averaging bound over the phase grid.
// -------------------------------------------------------------------------

fn run_criterion_4() -> (String, Vec<String>) {
    let tols = Tolerances::default();
    let fixtures: Vec<(SeparableRational, Vec<u32>)> = vec![
        (
            SeparableRational::new(
                MultiPoly::constant(1, c64(1.0, 0.0)),
                vec![one_plus_x2_pow(2)],
            )
            .unwrap(),
            vec![2],
        ),
        (
            SeparableRational::new(
                MultiPoly::constant(1, c64(1.0, 0.0)),
                vec![one_plus_x2_pow(3)],
            )
            .unwrap(),
            vec![3],
        ),
        (
            {
                let mut num = MultiPoly::zero(1);
                num.add_term(MultiIndex(vec![1]), c64(1.0, 0.0));
                SeparableRational::new(num, vec![one_plus_x2_pow(3)]).unwrap()
            },
            vec![3],
        ),
        (
            SeparableRational::new(
                MultiPoly::constant(1, c64(0.5, -1.0)),
                vec![one_plus_x2_pow(4)],
            )
            .unwrap(),
            vec![4],
        ),
        (
            {
                let mut num = MultiPoly::zero(1);
                num.add_term(MultiIndex(vec![0]), c64(1.0, 0.0));
                num.add_term(MultiIndex(vec![1]), c64(1.0, 0.0));
                SeparableRational::new(num, vec![one_plus_x2_pow(4)]).unwrap()
            },
            vec![4],
        ),
    ];
    let mut details = Vec::new();
    let mut reports = Vec::new();
    for p in [0.3f64, 0.5, 0.7] {
        for (atom, l) in &fixtures {
            let m = SplitParams::default_m(l, 1);
            let mean = mean_over_phase(atom, p, &m, 64, 42, &tols).unwrap();
            assert!(
                mean.mean <= mean.bound + 3.0 * mean.accumulated_error,
                "p={p}: mean {} vs bound {} (+3 x {})",
                mean.mean,
                mean.bound,
                mean.accumulated_error
            );
            let (_, split) = select_phase(atom, p, &m, 16, 42, &tols).unwrap();
            assert!(
                split.norm_sum
                    <= c_np(1, p) * split.atom_norm.value
                        + 3.0 * (split.atom_norm.abs_error * c_np(1, p)
                            + split.norms.iter().map(|(_, q)| q.abs_error).sum::<f64>()),
                "p={p}: selected phase misses the bound"
            );
            details.push(format!(
                "p={p}: mean/bound = {:.3}",
                mean.mean / mean.bound
            ));
            reports.push(mean);
        }
    }
    (serde_json::to_string(&reports).unwrap(), details)
}

fn criterion4_cache() -> &'static (String, Vec<String>) {
    static CACHE: OnceLock<(String, Vec<String>)> = OnceLock::new();
    CACHE.get_or_init(run_criterion_4)
}

#[test]
fn criterion_04_averaging_bound() {
    let _guard = lock();
    let t0 = Instant::now();
    let (_, details) = criterion4_cache();
    let elapsed = t0.elapsed();
    budget(4, elapsed, 60.0);
    report_line(
        4,
        "averaging bound",
        elapsed,
        &format!("15 fixture/p combinations, worst {}", details.last().unwrap()),
    );
}

// -------------------------------------------------------------------------
// 5. Norm slices are maximized at the boundary.
// -------------------------------------------------------------------------
#[test]
fn criterion_05_norm_slice_boundary_max() {
    let _guard = lock();
    let t0 = Instant::now();
    let tols = Tolerances::default();

    struct Fixture {
        r: SeparableRational,
        octant: SignVector,
        p: f64,
    }
    let fixtures = vec![
        Fixture {
            r: SeparableRational::new(
                MultiPoly::constant(1, c64(1.0, 0.0)),
                vec![binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 6)],
            )
            .unwrap(),
            octant: SignVector::first(1),
            p: 0.5,
        },
        Fixture {
            r: SeparableRational::new(
                MultiPoly::constant(1, c64(1.0, 0.0)),
                vec![binomial_power(c64(0.0, -1.0), c64(1.0, 0.0), 4)],
            )
            .unwrap(),
            octant: SignVector::parse("-").unwrap(),
            p: 0.7,
        },
        Fixture {
            r: SeparableRational::new(
                MultiPoly::constant(1, c64(1.0, 0.0)),
                vec![UniPoly::from_roots(&[
                    c64(1.0, 0.0),
                    c64(-1.0, 0.0),
                    c64(2.5, 0.0),
                ])],
            )
            .unwrap(),
            octant: SignVector::first(1),
            p: 0.5,
        },
        Fixture {
            r: SeparableRational::new(
                MultiPoly::constant(2, c64(1.0, 0.0)),
                vec![
                    binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 4),
                    binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 4),
                ],
            )
            .unwrap(),
            octant: SignVector::first(2),
            p: 0.5,
        },
    ];
    let mut checked = 0usize;
    for fx in &fixtures {
        let cert = certify(&fx.r, &fx.octant, fx.p, &tols).unwrap();
        assert!(cert.is_valid(), "fixture must certify VALID");
        let n = fx.r.nvars();
        let base = cert.quasi_norm.as_ref().unwrap();
        let y_grid: Vec<Vec<f64>> = (1..=8)
            .map(|j| {
                (0..n)
                    .map(|k| fx.octant.signs()[k] as f64 * 0.3 * j as f64)
                    .collect()
            })
            .collect();
        let tol = if n == 1 { 1e-7 } else { 1e-4 };
        let profile = norm_slice_profile(&fx.r, fx.p, &fx.octant, &y_grid, tol, &tols).unwrap();
        for slice in &profile {
            assert!(
                slice.value <= base.value * (1.0 + 1e-6) + base.abs_error + slice.abs_error,
                "slice at {:?} exceeds the boundary slice: {} vs {}",
                slice.y_offset,
                slice.value,
                base.value
            );
            checked += 1;
        }
    }
    let elapsed = t0.elapsed();
    budget(5, elapsed, 60.0);
    report_line(
        5,
        "norm slice boundary max",
        elapsed,
        &format!("{checked} interior slices below their boundary values"),
    );
}

// -------------------------------------------------------------------------
// 6. Interior sup bound.
// -------------------------------------------------------------------------
#[test]
fn criterion_06_interior_sup_bound() {
    let _guard = lock();
    let t0 = Instant::now();
    let tols = Tolerances::default();

    let mut fixtures: Vec<(SeparableRational, SignVector, f64, Vec<f64>)> = Vec::new();
    fixtures.push((
        SeparableRational::new(
            MultiPoly::constant(1, c64(1.0, 0.0)),
            vec![binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 6)],
        )
        .unwrap(),
        SignVector::first(1),
        0.5,
        vec![1.0],
    ));
    fixtures.push((
        SeparableRational::new(
            MultiPoly::constant(1, c64(2.0, 1.0)),
            vec![binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 4)],
        )
        .unwrap(),
        SignVector::first(1),
        0.5,
        vec![0.5],
    ));
    fixtures.push((
        // Pole at +2i: holomorphic over the lower half-plane.
        SeparableRational::new(
            MultiPoly::constant(1, c64(1.0, 0.0)),
            vec![binomial_power(c64(0.0, -2.0), c64(1.0, 0.0), 4)],
        )
        .unwrap(),
        SignVector::parse("-").unwrap(),
        0.6,
        vec![1.5],
    ));
    fixtures.push((
        SeparableRational::new(
            MultiPoly::constant(2, c64(1.0, 0.0)),
            vec![
                binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 4),
                binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 4),
            ],
        )
        .unwrap(),
        SignVector::first(2),
        0.5,
        vec![1.0, 1.0],
    ));
    fixtures.push((
        {
            let mut num = MultiPoly::zero(2);
            num.add_term(MultiIndex(vec![1, 1]), c64(1.0, 0.0));
            SeparableRational::new(
                num,
                vec![
                    binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 6),
                    binomial_power(c64(0.0, 1.0), c64(1.0, 0.0), 6),
                ],
            )
            .unwrap()
        },
        SignVector::first(2),
        0.5,
        vec![0.8, 1.2],
    ));

    let mut max_ratio = 0.0f64;
    for (r, octant, p, delta) in &fixtures {
        let cert = certify(r, octant, *p, &tols).unwrap();
        assert!(cert.is_valid());
        let n = r.nvars();
        let grid = if n == 1 {
            hardy_tubes::hardy::default_tensor_grid(1, 1000, 10.0)
        } else {
            hardy_tubes::hardy::default_tensor_grid(2, 32, 10.0)
        };
        let report = interior_sup_check(r, &cert, delta, Some(&grid), &tols).unwrap();
        assert!(report.samples >= 1000);
        assert_eq!(report.violations, 0, "octant {octant}");
        assert!(report.max_ratio <= 1.0 + 1e-6);
        max_ratio = max_ratio.max(report.max_ratio);
    }
    let elapsed = t0.elapsed();
    budget(6, elapsed, 30.0);
    report_line(
        6,
        "interior sup bound",
        elapsed,
        &format!("5 fixtures, max observed/bound ratio {max_ratio:.3e}"),
    );
}

// -------------------------------------------------------------------------
// 7. End-to-end decomposition at desk scale.
// -------------------------------------------------------------------------

fn run_criterion_7() -> (String, hardy_tubes::OctantDecomposition) {
    let tols = Tolerances::default();
    let f = SampledFunction::gaussian(2);
    let cfg = DecomposeConfig {
        epsilon: 0.5,
        max_atoms: 8,
        residual_target_rel: 0.05,
        initial_degree: 40,
        grid_per_dim: 8,
        seed: 42,
        share_phase: false,
        check_tolerance: 0.05,
    };
    let d = decompose(&f, 0.5, 0.5, &cfg, &tols).unwrap();
    (serde_json::to_string(&d).unwrap(), d)
}

fn criterion7_cache() -> &'static (String, hardy_tubes::OctantDecomposition) {
    static CACHE: OnceLock<(String, hardy_tubes::OctantDecomposition)> = OnceLock::new();
    CACHE.get_or_init(run_criterion_7)
}

#[test]
fn criterion_07_end_to_end_gaussian() {
    let _guard = lock();
    let t0 = Instant::now();
    let (_, d) = criterion7_cache();
    assert!(d.series.atoms.len() <= 8);
    assert!(
        d.reconstruction_residual <= 0.05 * d.f_norm,
        "residual {} vs 0.05 * {}",
        d.reconstruction_residual,
        d.f_norm
    );
    assert!(
        d.total_norm_sum <= 1.5 * d.c_np * d.f_norm * (1.0 + 0.05),
        "norm sum {} vs budget {}",
        d.total_norm_sum,
        1.5 * d.c_np * d.f_norm
    );
    for oct in &d.per_octant {
        assert!(oct.all_valid, "octant {} has invalid certificates", oct.octant);
    }
    let elapsed = t0.elapsed();
    budget(7, elapsed, 120.0);
    report_line(
        7,
        "end-to-end gaussian n=2",
        elapsed,
        &format!(
            "{} stage(s), residual/f_norm {:.4}, norm_sum/(C_np f_norm) {:.4}",
            d.series.atoms.len(),
            d.reconstruction_residual / d.f_norm,
            d.total_norm_sum / (d.c_np * d.f_norm)
        ),
    );
}

// -------------------------------------------------------------------------
// 8. Non-uniqueness via the intersection class.
// -------------------------------------------------------------------------
#[test]
fn criterion_08_non_uniqueness() {
    let _guard = lock();
    let t0 = Instant::now();
    let tols = Tolerances::default();
    let p = 0.6;
    let atom = make_xp_atom(
        &[vec![1.0, -1.0], vec![1.0, -1.0]],
        MultiPoly::constant(2, c64(1.0, 0.0)),
        p,
        &tols,
    )
    .unwrap();
    assert!(atom.all_valid(), "all four octants certify");
    assert_eq!(atom.certificates.len(), 4);

    // The norm-slice profile is maximized at the boundary in every octant.
    // Percent-level slice accuracy suffices: the boundary value exceeds the
    // interior slices by a wide margin.
    for (octant, _) in &atom.certificates {
        let y = octant.signed(&[0.4, 0.4]);
        let profile =
            norm_slice_profile(&atom.rational, p, octant, &[y], 3e-2, &tols).unwrap();
        assert!(
            profile[0].value
                <= atom.norm.value * (1.0 + 1e-6) + atom.norm.abs_error + profile[0].abs_error,
            "octant {octant}: slice {} vs boundary {}",
            profile[0].value,
            atom.norm.value
        );
    }

    // Base decomposition: the whole function assigned to the last octant;
    // the unit-norm copy is then added to the first octant and subtracted
    // from the second, which moves those two norms from zero to one without
    // touching any value.
    let octants = SignVector::all(2);
    let base = OctantAssignment::single(2, &octants[3], atom.rational.clone());
    let unit = atom
        .rational
        .scale(c64(1.0 / atom.norm.value.powf(1.0 / p), 0.0));
    let signs = vec![(octants[0].clone(), 1i8), (octants[1].clone(), -1i8)];
    let alt = alternative_decomposition(&base, &unit, &signs, p, 1000, 42, &tols).unwrap();
    assert!(alt.inserted_valid);
    assert!(
        alt.max_reconstruction_diff <= 1e-10,
        "pointwise difference {}",
        alt.max_reconstruction_diff
    );
    let moved = alt
        .norm_shifts
        .iter()
        .filter(|s| s.delta.abs() >= 1e-3)
        .count();
    assert!(
        moved >= 2,
        "expected at least two octant norms to move: {:?}",
        alt.norm_shifts
    );
    let elapsed = t0.elapsed();
    budget(8, elapsed, 60.0);
    report_line(
        8,
        "non-uniqueness",
        elapsed,
        &format!(
            "reconstruction diff {:.2e}, {} octant norms moved",
            alt.max_reconstruction_diff, moved
        ),
    );
}

// -------------------------------------------------------------------------
// 9. Density demo.
// -------------------------------------------------------------------------
#[test]
fn criterion_09_density_demo() {
    let _guard = lock();
    let t0 = Instant::now();
    let tols = Tolerances::default();
    let big_n = 3u32;
    let p = 0.5;

    // Sweep fixture (z + i)^(-N-2). It is exactly representable at degree
    // one, so residuals bottom out at rounding level; monotonicity is
    // asserted up to an absolute 1e-12 floor.
    let f = SampledFunction::recip_power_boundary(big_n + 2);
    let mut residuals = Vec::new();
    for degree in [2u32, 4, 8] {
        let fit = fit_rn(&f, p, big_n, degree, &SignVector::first(1), 0, &tols).unwrap();
        residuals.push(fit.sup_residual);
    }
    for w in residuals.windows(2) {
        assert!(
            w[1] <= w[0] + 1e-12,
            "sup residuals must not grow beyond the rounding floor: {residuals:?}"
        );
    }

    // Exact class member (z + i)^(-N-1) recovered to 1e-10.
    let exact = SampledFunction::recip_power_boundary(big_n + 1);
    let fit = fit_rn(&exact, p, big_n, 2, &SignVector::first(1), 0, &tols).unwrap();
    assert!(fit.sup_residual <= 1e-10, "sup {}", fit.sup_residual);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let x = -12.0 + 0.5 * k as f64;
        let want = c64(x, 1.0).powi(-(big_n as i32 + 1));
        let got = fit.atom.rational.eval_unchecked(&[c64(x, 0.0)]);
        worst = worst.max((want - got).norm() / (1.0 + want.norm()));
    }
    assert!(worst <= 1e-10, "recovery deviation {worst:e}");

    let elapsed = t0.elapsed();
    budget(9, elapsed, 30.0);
    report_line(
        9,
        "density demo",
        elapsed,
        &format!("sweep residuals {residuals:?}, recovery deviation {worst:.2e}"),
    );
}

// -------------------------------------------------------------------------
// 10. Determinism of the heavyweight reports.
// -------------------------------------------------------------------------
#[test]
fn criterion_10_determinism() {
    let _guard = lock();
    let t0 = Instant::now();

    let (first_2, _) = criterion2_cache().clone();
    let (second_2, _) = run_criterion_2();
    assert_eq!(first_2, second_2, "criterion 2 reports differ between runs");

    let (first_4, _) = criterion4_cache().clone();
    let (second_4, _) = run_criterion_4();
    assert_eq!(first_4, second_4, "criterion 4 reports differ between runs");

    let (first_7, _) = criterion7_cache().clone();
    let (second_7, _) = run_criterion_7();
    assert_eq!(first_7, second_7, "criterion 7 reports differ between runs");

    let elapsed = t0.elapsed();
    report_line(
        10,
        "determinism",
        elapsed,
        &format!(
            "byte-identical reruns of criteria 2 ({}B), 4 ({}B), 7 ({}B)",
            first_2.len(),
            first_4.len(),
            first_7.len()
        ),
    );
}
