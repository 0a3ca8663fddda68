//! Adaptive one-dimensional integration over the real line.
//!
//! The substitution `x = tan(t)` compactifies the line onto `(-pi/2, pi/2)`;
//! cell boundaries are inserted exactly at every supplied singular point and
//! plain bisection then grades geometrically toward poles and toward the
//! endpoints, which is all an algebraic integrable singularity needs. Each
//! cell carries a two-level Richardson difference as its error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Newton iteration on the Legendre polynomial; order is tiny so no
    /// caching is needed.
    pub fn new(order: usize) -> Self {
        let n = order.max(2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            // Tricomi-style initial guess.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n and P_n'.
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub rel_tol: f64,
    pub gl_order: usize,
    pub max_cells: usize,
    pub max_depth: u32,
}

/// Outcome of one adaptive pass.
#[derive(Debug, Clone, Copy)]
pub struct AxisResult {
    pub value: f64,
    /// Richardson estimate plus the integrated inner error of the integrand.
    pub abs_error: f64,
    pub converged: bool,
    pub cells: usize,
}

struct Cell {
    t0: f64,
    t1: f64,
    /// Where this cell splits (midpoint, or a graded point toward a
    /// singular endpoint).
    split_at: f64,
    /// Two-part estimates on `[t0, split_at]` and `[split_at, t1]`, reused
    /// as the children's coarse values when the cell splits.
    left_half: f64,
    right_half: f64,
    /// Integrated inner error over the two parts.
    inner_err: f64,
    /// Two-level Richardson difference against the one-panel estimate.
    err: f64,
    depth: u32,
    seq: u64,
    frozen: bool,
}

impl Cell {
    fn fine(&self) -> f64 {
        self.left_half + self.right_half
    }
}

struct HeapEntry {
    err: f64,
    seq: u64,
    idx: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Larger error first; ties broken by creation order for determinism.
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Integrates `f` over the whole real line in `t = atan(x)` coordinates.
///
/// `f(t)` must already include the `1 + tan(t)^2` jacobian and return
/// `(integrand, inner_abs_error)`; the second slot lets iterated integrals
/// propagate the error of nested quadratures with the correct weights.
///
/// Cells whose endpoint sits exactly on a singular point (or on the `+-pi/2`
/// tails) refine geometrically with ratio 1/10 toward it instead of
/// bisecting: an algebraic `|u|^(-beta)` endpoint singularity then loses a
/// factor `10^(1-beta)` of its contribution per level.
pub fn integrate_line(
    f: &mut dyn FnMut(f64) -> (f64, f64),
    singular_t: &[f64],
    cfg: &EngineConfig,
) -> AxisResult {
    integrate_line_cells(f, singular_t, cfg).0
}

fn integrate_line_cells(
    f: &mut dyn FnMut(f64) -> (f64, f64),
    singular_t: &[f64],
    cfg: &EngineConfig,
) -> (AxisResult, Vec<(f64, f64)>) {
    let rule = GaussRule::new(cfg.gl_order);

    // Initial breakpoints: endpoints plus singular points, deduplicated.
    let mut breaks = vec![-FRAC_PI_2, FRAC_PI_2];
    breaks.extend(
        singular_t
            .iter()
            .copied()
            .filter(|t| t.is_finite() && t.abs() < FRAC_PI_2),
    );
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let singular_endpoints: Vec<f64> = breaks.clone();
    // Keep initial cells below a width GL can resolve.
    let mut edges = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        edges.push(a);
        let pieces = ((b - a) / 0.4).ceil() as usize;
        for j in 1..pieces {
            edges.push(a + (b - a) * j as f64 / pieces as f64);
        }
    }
    edges.push(FRAC_PI_2);

    let mut cells: Vec<Cell> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut total = 0.0f64;
    let mut live_err = 0.0f64;
    for w in edges.windows(2) {
        let cell = make_cell(f, &rule, w[0], w[1], None, 0, seq, &singular_endpoints);
        total += cell.fine();
        live_err += cell.err;
        heap.push(HeapEntry {
            err: cell.err,
            seq,
            idx: cells.len(),
        });
        cells.push(cell);
        seq += 1;
    }

    while live_err > cfg.rel_tol * (1.0 + total.abs()) && cells.len() < cfg.max_cells {
        // Pop the worst live cell.
        let top = loop {
            match heap.pop() {
                None => break None,
                Some(e) => {
                    let c = &cells[e.idx];
                    if !c.frozen && c.err == e.err && c.seq == e.seq {
                        break Some(e.idx);
                    }
                }
            }
        };
        let Some(idx) = top else { break };
        if cells[idx].depth >= cfg.max_depth {
            cells[idx].frozen = true;
            live_err -= cells[idx].err;
            continue;
        }
        let (t0, t1, depth) = (cells[idx].t0, cells[idx].t1, cells[idx].depth);
        let (lh, rh, old_mid) = (
            cells[idx].left_half,
            cells[idx].right_half,
            cells[idx].split_at,
        );
        total -= cells[idx].fine();
        live_err -= cells[idx].err;
        let left = make_cell(
            f,
            &rule,
            t0,
            old_mid,
            Some(lh),
            depth + 1,
            seq,
            &singular_endpoints,
        );
        seq += 1;
        let right = make_cell(
            f,
            &rule,
            old_mid,
            t1,
            Some(rh),
            depth + 1,
            seq,
            &singular_endpoints,
        );
        seq += 1;
        total += left.fine() + right.fine();
        live_err += left.err + right.err;
        // Replace the parent in place and append the second child.
        heap.push(HeapEntry {
            err: left.err,
            seq: left.seq,
            idx,
        });
        heap.push(HeapEntry {
            err: right.err,
            seq: right.seq,
            idx: cells.len(),
        });
        cells[idx] = left;
        cells.push(right);
    }

    // Deterministic final reduction: sort by interval start.
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].t0.partial_cmp(&cells[b].t0).unwrap());
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    for &i in &order {
        // Kahan summation keeps the reduction bit-stable and accurate.
        let y = cells[i].fine() - comp;
        let t = value + y;
        comp = (t - value) - y;
        value = t;
        err += cells[i].err + cells[i].inner_err;
    }
    (
        AxisResult {
            value,
            abs_error: err,
            converged: err <= cfg.rel_tol * (1.0 + value.abs()),
            cells: cells.len(),
        },
        cells.iter().map(|c| (c.t0, c.t1)).collect(),
    )
}

/// Runs the same adaptive refinement as [`integrate_line`] and returns the
/// final partition, sorted; used to build pole-aware product rules for
/// separable integrands.
pub fn partition_line(
    f: &mut dyn FnMut(f64) -> (f64, f64),
    singular_t: &[f64],
    cfg: &EngineConfig,
) -> Vec<(f64, f64)> {
    let mut cells = integrate_line_cells(f, singular_t, cfg).1;
    cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    cells
}

/// Grading ratio toward singular endpoints.
const GRADE: f64 = 0.1;

fn is_singular_endpoint(t: f64, singular: &[f64]) -> bool {
    singular
        .binary_search_by(|s| s.partial_cmp(&t).unwrap())
        .map(|_| true)
        .unwrap_or_else(|pos| {
            let tol = 1e-14 * (1.0 + t.abs());
            (pos < singular.len() && (singular[pos] - t).abs() <= tol)
                || (pos > 0 && (singular[pos - 1] - t).abs() <= tol)
        })
}

#[allow(clippy::too_many_arguments)]
fn make_cell(
    f: &mut dyn FnMut(f64) -> (f64, f64),
    rule: &GaussRule,
    t0: f64,
    t1: f64,
    coarse: Option<f64>,
    depth: u32,
    seq: u64,
    singular: &[f64],
) -> Cell {
    let coarse = match coarse {
        Some(v) => v,
        None => panel(f, rule, t0, t1).0,
    };
    let left_singular = is_singular_endpoint(t0, singular);
    let right_singular = is_singular_endpoint(t1, singular);
    let split_at = if left_singular && !right_singular {
        t0 + GRADE * (t1 - t0)
    } else if right_singular && !left_singular {
        t1 - GRADE * (t1 - t0)
    } else {
        0.5 * (t0 + t1)
    };
    let (lv, le) = panel(f, rule, t0, split_at);
    let (rv, re) = panel(f, rule, split_at, t1);
    let fine = lv + rv;
    Cell {
        t0,
        t1,
        split_at,
        left_half: lv,
        right_half: rv,
        inner_err: le + re,
        err: (fine - coarse).abs(),
        depth,
        seq,
        frozen: false,
    }
}

fn panel(f: &mut dyn FnMut(f64) -> (f64, f64), rule: &GaussRule, t0: f64, t1: f64) -> (f64, f64) {
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t0 + t1);
    let mut acc = 0.0;
    let mut errs = 0.0;
    for (node, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let (v, e) = f(mid + half * node);
        acc += w * v;
        errs += w * e;
    }
    (acc * half, errs * half.abs())
}
