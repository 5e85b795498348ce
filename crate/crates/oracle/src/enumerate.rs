//! Exact information measures by direct enumeration of finite joint laws.

/// Shannon entropy (nats) of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum()
}

/// I(X;Y) for input law `px` and channel rows `w[x][y]`, computed as
/// H(Y) − H(Y|X).
pub fn mutual_information(px: &[f64], w: &[Vec<f64>]) -> f64 {
    let ny = w.iter().map(Vec::len).max().unwrap_or(0);
    let mut py = vec![0.0; ny];
    for (p, row) in px.iter().zip(w) {
        for (y, v) in row.iter().enumerate() {
            py[y] += p * v;
        }
    }
    let h_cond: f64 = px.iter().zip(w).map(|(p, row)| p * entropy(row)).sum();
    entropy(&py) - h_cond
}

/// Discrete convolution of two pmfs.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
