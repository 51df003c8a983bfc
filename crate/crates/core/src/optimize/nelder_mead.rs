//! Nelder–Mead simplex search over four angles, maximizing.

const DIM: usize = 4;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub max_iterations: usize,
    /// Stop once the spread of objective values over the simplex is below this.
    pub tolerance: f64,
    /// Size of the initial simplex along each axis.
    pub step: f64,
    /// Stop as soon as a vertex exceeds this value.
    pub stop_above: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub x: [f64; DIM],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn lerp(a: &[f64; DIM], b: &[f64; DIM], t: f64) -> [f64; DIM] {
    let mut out = [0.0; DIM];
    for k in 0..DIM {
        out[k] = a[k] + t * (b[k] - a[k]);
    }
    out
}

/// Maximizes `f` from `x0`. NaN objective values are treated as −∞.
pub fn maximize<F>(f: F, x0: [f64; DIM], opts: &Options) -> Outcome
where
    F: Fn(&[f64; DIM]) -> f64,
{
    let eval = |x: &[f64; DIM]| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<([f64; DIM], f64)> = Vec::with_capacity(DIM + 1);
    simplex.push((x0, eval(&x0)));
    for k in 0..DIM {
        let mut x = x0;
        x[k] += opts.step;
        simplex.push((x, eval(&x)));
    }

    let reached = |s: &[([f64; DIM], f64)]| opts.stop_above.is_some_and(|t| s[0].1 > t);
    let mut iterations = 0;
    let mut converged = false;
    loop {
        // best first; ties keep insertion order
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        if reached(&simplex) {
            converged = true;
            break;
        }
        let spread = simplex[0].1 - simplex[DIM].1;
        if spread.is_finite() && spread.abs() <= opts.tolerance {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; DIM];
        for (x, _) in &simplex[..DIM] {
            for k in 0..DIM {
                centroid[k] += x[k] / DIM as f64;
            }
        }
        let worst = simplex[DIM];
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = eval(&reflected);

        if fr > simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = eval(&expanded);
            simplex[DIM] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr > simplex[DIM - 1].1 {
            simplex[DIM] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr > worst.1 {
            let c = lerp(&centroid, &worst.0, -0.5);
            (c, eval(&c))
        } else {
            let c = lerp(&centroid, &worst.0, 0.5);
            (c, eval(&c))
        };
        if fc > worst.1.max(fr) {
            simplex[DIM] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0;
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &vertex.0, 0.5);
            *vertex = (x, eval(&x));
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    Outcome {
        x: simplex[0].0,
        value: simplex[0].1,
        iterations,
        converged,
    }
}
