//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use dsair::RaceParams;

/// The 2x2 AS/AU race matrix written out entry by entry.
pub fn direct_race_matrix(params: &RaceParams) -> [[f64; 2]; 2] {
    let (b, c, s) = (params.benefit, params.safety_cost, params.unsafe_speed);
    let prize_rate = params.prize / f64::from(params.rounds);
    let p = 1.0 - params.disaster_risk;
    let safe_safe = -c + b / 2.0;
    let safe_unsafe = -c + b / (s + 1.0);
    let unsafe_safe = s * b / (s + 1.0);
    let unsafe_unsafe = b / 2.0;
    [
        [prize_rate / 2.0 + safe_safe, safe_unsafe],
        [
            p * (s * prize_rate + unsafe_safe),
            p * (s * prize_rate / 2.0 + unsafe_unsafe),
        ],
    ]
}

/// Transition probabilities `T+(k)`, `T-(k)` of the birth-death chain in
/// the number of A players, written out literally.
pub fn birth_death_rates(k: u32, pi: [f64; 4], z: u32, beta: f64) -> (f64, f64) {
    let (kf, zf) = (f64::from(k), f64::from(z));
    let pa = ((kf - 1.0) * pi[0] + (zf - kf) * pi[1]) / (zf - 1.0);
    let pb = (kf * pi[2] + (zf - kf - 1.0) * pi[3]) / (zf - 1.0);
    let mix = (zf - kf) / zf * kf / zf;
    let up = mix / (1.0 + (-beta * (pa - pb)).exp());
    let down = mix / (1.0 + (beta * (pa - pb)).exp());
    (up, down)
}

/// Probability of absorption at `k = Z` starting from `k = 1`, by solving
/// the tridiagonal system `(T+ + T-) x_k - T+ x_{k+1} - T- x_{k-1} = 0`
/// with `x_0 = 0`, `x_Z = 1`.
///
/// Forward elimination tracks the eliminated diagonal as `T+ + g` where `g`
/// is the mass leaking toward `k = 0`, so no step subtracts (GTH style).
pub fn absorption_probability(pi: [f64; 4], z: u32, beta: f64) -> f64 {
    let m = (z - 1) as usize;
    let rates: Vec<(f64, f64)> = (1..z).map(|k| birth_death_rates(k, pi, z, beta)).collect();
    let mut diag = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut leak = rates[0].1;
    for idx in 0..m {
        let (up, down) = rates[idx];
        if idx > 0 {
            leak = down * leak / diag[idx - 1];
        }
        diag[idx] = up + leak;
        rhs[idx] = if idx > 0 {
            down * rhs[idx - 1] / diag[idx - 1]
        } else {
            0.0
        };
        if idx == m - 1 {
            rhs[idx] += up;
        }
    }
    let mut x = rhs[m - 1] / diag[m - 1];
    for idx in (0..m - 1).rev() {
        x = (rhs[idx] + rates[idx].0 * x) / diag[idx];
    }
    x
}
