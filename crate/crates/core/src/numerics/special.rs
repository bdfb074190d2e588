use std::f64::consts::PI;

/// Volume of the `j`-dimensional unit ball.
pub fn kappa(j: usize) -> f64 {
    let mut k = if j.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut m = if j.is_multiple_of(2) { 2 } else { 3 };
    while m <= j {
        k *= 2.0 * PI / m as f64;
        m += 2;
    }
    k
}

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Flag coefficient `binom(n,k) * kappa_n / (kappa_k * kappa_{n-k})`.
pub fn flag_coefficient(n: usize, k: usize) -> f64 {
    assert!(k <= n, "flag coefficient needs k <= n");
    binom(n, k) * kappa(n) / (kappa(k) * kappa(n - k))
}

/// Elementary symmetric polynomial `e_k` of the given values.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &v in values {
        for i in (1..=k).rev() {
            e[i] += v * e[i - 1];
        }
    }
    e[k]
}
