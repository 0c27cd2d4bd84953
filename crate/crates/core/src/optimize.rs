//! Derivative-free optimization helpers: a compact Nelder-Mead simplex for
//! the low-dimensional refinements used by the measure and steering searches.

/// Minimize `f` over R^n by Nelder-Mead starting from `x0` with initial step
/// `step`. Stops when the function-value spread falls below `f_tol` or after
/// `max_iter` iterations. Returns (argmin, min).
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    f_tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if (values[worst] - values[best]).abs() < f_tol {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for k in 0..n {
                centroid[k] += simplex[i][k] / n as f64;
            }
        }

        let reflect = |t: f64, from: &[f64]| -> Vec<f64> {
            (0..n).map(|k| centroid[k] + t * (centroid[k] - from[k])).collect()
        };

        let xr = reflect(alpha, &simplex[worst]);
        let fr = f(&xr);
        if fr < values[best] {
            let xe = reflect(gamma, &simplex[worst]);
            let fe = f(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = xr;
            values[worst] = fr;
        } else {
            let xc = reflect(-rho, &simplex[worst]);
            let fc = f(&xc);
            if fc < values[worst] {
                simplex[worst] = xc;
                values[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let best_point = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for k in 0..n {
                        simplex[i][k] = best_point[k] + sigma * (simplex[i][k] - best_point[k]);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Maximize `f` by minimizing its negative.
pub fn nelder_mead_max(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    f_tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let (x, neg) = nelder_mead(&mut |v| -f(v), x0, step, f_tol, max_iter);
    (x, -neg)
}
