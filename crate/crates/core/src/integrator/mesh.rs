use crate::dde::DelayedProblem;

const MAX_BREAKING_POINTS: usize = 4096;

/// Discontinuity points `t0 + sum_j c_j tau_j < T` generated by the constant positive lags,
/// sorted, with `t0` first and `T` last. Non-constant delays contribute nothing.
pub fn breaking_points(problem: &DelayedProblem) -> Vec<f64> {
    let (t0, horizon) = (problem.t0(), problem.horizon());
    let mut lags: Vec<f64> = problem
        .constant_lags()
        .iter()
        .flatten()
        .copied()
        .filter(|&tau| tau > 0.0)
        .collect();
    lags.sort_by(f64::total_cmp);
    lags.dedup();
    let tol = 1e-10 * horizon.abs().max(t0.abs()).max(1.0);

    let mut points = vec![t0];
    let mut frontier = vec![t0];
    while !frontier.is_empty() && points.len() < MAX_BREAKING_POINTS {
        let mut next = Vec::new();
        for &p in &frontier {
            for &tau in &lags {
                let q = p + tau;
                if q < horizon - tol && !points.iter().chain(&next).any(|&r| (r - q).abs() <= tol) {
                    next.push(q);
                }
            }
        }
        points.extend(&next);
        frontier = next;
    }
    points.truncate(MAX_BREAKING_POINTS);
    points.push(horizon);
    points.sort_by(f64::total_cmp);
    points
}

/// Splits `[a, b]` into `ceil((b - a) / step)` equal pieces, returning the interior nodes and `b`.
pub(crate) fn subdivide(a: f64, b: f64, step: f64, out: &mut Vec<f64>) {
    let pieces = (((b - a) / step) - 1e-9).ceil().max(1.0) as usize;
    for k in 1..pieces {
        out.push(a + (b - a) * k as f64 / pieces as f64);
    }
    out.push(b);
}

/// Planned forward nodes on `(t0, T]`.
pub(crate) fn forward_nodes(
    problem: &DelayedProblem,
    step: f64,
    use_breaking_points: bool,
) -> (Vec<f64>, Vec<f64>) {
    let bps = if use_breaking_points {
        breaking_points(problem)
    } else {
        vec![problem.t0(), problem.horizon()]
    };
    let mut nodes = Vec::new();
    for w in bps.windows(2) {
        subdivide(w[0], w[1], step, &mut nodes);
    }
    (nodes, bps)
}

/// History nodes on `[gamma, t0]`.
pub(crate) fn history_nodes(gamma: f64, t0: f64, step: f64) -> Vec<f64> {
    let mut nodes = vec![gamma];
    if gamma < t0 {
        subdivide(gamma, t0, step, &mut nodes);
    }
    nodes
}
