//! Fixed 20-point Gauss-Legendre panel on [-1, 1].

/// Nodes (positive half; the rule is symmetric).
const NODES: [f64; 10] = [
    0.076526521133497333,
    0.227785851141645078,
    0.373706088715419561,
    0.510867001950827098,
    0.636053680726515025,
    0.746331906460150793,
    0.839116971822218823,
    0.912234428251325906,
    0.963971927277913791,
    0.993128599185094925,
];

const WEIGHTS: [f64; 10] = [
    0.152753387130725851,
    0.149172986472603747,
    0.142096109318382051,
    0.131688638449176627,
    0.118194531961518417,
    0.101930119817240435,
    0.083276741576704749,
    0.062672048334109064,
    0.040601429800386941,
    0.017614007139152118,
];

/// Integrate `f` over `[a, b]` with one 20-point Gauss-Legendre panel.
pub fn gauss_legendre_20(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..10 {
        let dx = half * NODES[i];
        acc += WEIGHTS[i] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}
