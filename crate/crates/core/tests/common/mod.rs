//! Frozen reference values shared by the integration tests.
//!
//! `c_{N,s}` values and the ramp values `κ(α, s) = (-Δ)^s x_+^α |_{x=1}` were
//! computed independently in 40-digit arithmetic. The stiffness entries are
//! brute-force double integrals of the bilinear form on a uniform mesh.
#![allow(dead_code, clippy::excessive_precision, clippy::approx_constant)]

/// `(N, s, c_{N,s})`.
pub const NORMALIZATION: &[(usize, f64, f64)] = &[
    (1, 0.5, 0.318309886183790672),
    (2, 0.5, 0.159154943091895336),
    (1, 0.25, 0.199471140200716339),
    (1, 0.75, 0.299206710301074508),
    (3, 0.3, 0.0585935624515058952),
    (2, 0.75, 0.171167129690552343),
    (3, 0.5, 0.101321183642337771),
    (1, 0.1, 0.090313982871455618),
    (1, 0.4, 0.281958452999990389),
    (1, 0.9, 0.164904938818302696),
];

/// `(α, s, κ)`.
pub const RAMP: &[(f64, f64, f64)] = &[
    (1.0, 0.75, -0.398942280401432678),
    (1.0, 0.6, -1.38978929130103381),
    (1.2, 0.9, -0.422534610619117213),
    (1.4, 0.9, -0.877048710312740215),
    (1.6, 0.9, -1.69013844247646885),
    (1.0, 0.9, -0.114517318623821337),
    (1.25, 0.75, -1.30756202506637706),
    (1.5, 0.8, -3.25675167807945154),
    (1.0, 0.55, -2.99096084955516313),
];

/// Nonlocal stiffness on (-1, 1) with n = 9 interior nodes:
/// `(s, A_11, A_15, A_19)` with one-based indices.
pub const STIFFNESS_N9: &[(f64, f64, f64, f64)] = &[
    (
        0.5,
        0.882542400610606374,
        -0.0212703186312225398,
        -0.00505318139649059725,
    ),
    (
        0.25,
        0.315310253170085975,
        -0.0116221967700904937,
        -0.00398162351850439471,
    ),
    (
        0.75,
        2.78697522742767159,
        -0.0230703193803306599,
        -0.00378274323564288832,
    ),
];

/// Nonlocal stiffness on (-1, 1) with n = 3: `(s, A_11, A_12, A_13)`.
pub const STIFFNESS_N3: &[(f64, f64, f64, f64)] = &[
    (
        0.3,
        0.5527374293368785,
        -0.03146728222148773,
        -0.07366033794411500,
    ),
    (
        0.5,
        0.88254240061060637,
        -0.19143861467394375,
        -0.11678794191483139,
    ),
    (
        0.75,
        1.76263790022745184,
        -0.66382089310518757,
        -0.13988370420710842,
    ),
];

/// Closed form `c_{N,s} = 2^{2s} s Γ((N+2s)/2) / (π^{N/2} Γ(1-s))`.
pub fn closed_form_constant(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    4f64.powf(s) * s * libm::tgamma((nf + 2.0 * s) / 2.0)
        / (std::f64::consts::PI.powf(nf / 2.0) * libm::tgamma(1.0 - s))
}

/// `(-Δ)^s (1 - |x|^2)_+^s = 2^{2s} Γ(1+s) Γ(N/2+s) / Γ(N/2)` on the unit ball.
pub fn bump_s_value(n: usize, s: f64) -> f64 {
    let h = n as f64 / 2.0;
    4f64.powf(s) * libm::tgamma(1.0 + s) * libm::tgamma(h + s) / libm::tgamma(h)
}

/// `(-Δ)^s (1 - |x|^2)_+^{1+s}` at radius `r < 1`.
pub fn bump_one_plus_s_value(n: usize, s: f64, r: f64) -> f64 {
    let h = n as f64 / 2.0;
    4f64.powf(s) * libm::tgamma(2.0 + s) * libm::tgamma(h + s) / libm::tgamma(h)
        * (1.0 - (1.0 + 2.0 * s / n as f64) * r * r)
}

/// Brute-force Gagliardo form entry `A_ij` (one-based `i`, `j`) for hat
/// functions on the uniform mesh of `(a, b)` with `n` interior nodes.
///
/// The plane is split into `Ω×Ω`, integrated element pair by element pair
/// with iterated tanh-sinh quadrature (in offset variables where the kernel
/// is singular), and the two exterior strips, whose inner integral is done
/// in closed form.
pub fn brute_force_entry(a: f64, b: f64, n: usize, i: usize, j: usize, s: f64, c: f64) -> f64 {
    use mixlap_core::quadrature::tanh_sinh;
    let h = (b - a) / (n + 1) as f64;
    let hat = |k: usize, x: f64| (1.0 - ((x - (a + k as f64 * h)) / h).abs()).max(0.0);
    // slope of hat `m` on element `k`
    let slope = |m: usize, k: usize| {
        if k + 1 == m {
            1.0 / h
        } else if k == m {
            -1.0 / h
        } else {
            0.0
        }
    };
    let touches = |k: usize, e: usize| e + 1 == k || e == k;
    let ts = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64| {
        tanh_sinh(f, lo, hi, tol, 10.0 * tol)
            .expect("oracle quadrature")
            .value
    };
    let e = -1.0 - 2.0 * s;
    let mut inner = 0.0;
    for k in 0..=n {
        for l in 0..=n {
            if !(touches(i, k) || touches(i, l)) || !(touches(j, k) || touches(j, l)) {
                continue;
            }
            let (xk, xl) = (a + k as f64 * h, a + l as f64 * h);
            let kern = |d: f64| if d == 0.0 { 0.0 } else { d.abs().powf(e) };
            // adjacent elements are parametrized by offsets (σ, τ) from the
            // shared node so that |x - y| = σ + τ is exact near the corner
            let value = if k == l {
                let outer = |x: f64| {
                    let f = |d: f64| slope(i, k) * slope(j, k) * d.powf(1.0 - 2.0 * s);
                    ts(&f, 0.0, x - xk, 1e-13) + ts(&f, 0.0, xk + h - x, 1e-13)
                };
                ts(&outer, xk, xk + h, 1e-12)
            } else if k.abs_diff(l) == 1 {
                let (sk, sl) = ((slope(i, k), slope(j, k)), (slope(i, l), slope(j, l)));
                let outer = |sigma: f64| {
                    let f = |tau: f64| {
                        (sk.0 * sigma + sl.0 * tau)
                            * (sk.1 * sigma + sl.1 * tau)
                            * kern(sigma + tau)
                    };
                    ts(&f, 0.0, h, 1e-13)
                };
                ts(&outer, 0.0, h, 1e-12)
            } else {
                let outer = |x: f64| {
                    let f =
                        |y: f64| (hat(i, x) - hat(i, y)) * (hat(j, x) - hat(j, y)) * kern(x - y);
                    ts(&f, xl, xl + h, 1e-13)
                };
                ts(&outer, xk, xk + h, 1e-12)
            };
            inner += value;
        }
    }
    let strip = |x: f64| {
        hat(i, x) * hat(j, x) * ((x - a).powf(-2.0 * s) + (b - x).powf(-2.0 * s)) / (2.0 * s)
    };
    let mut exterior = 0.0;
    for k in 0..=n {
        let xk = a + k as f64 * h;
        if touches(i, k) && touches(j, k) {
            exterior += ts(&strip, xk, xk + h, 1e-13);
        }
    }
    0.5 * c * inner + c * exterior
}
