//! Direct expansion of `σ_k` through generalized Kronecker symbols.
//!
//! Exponential in `k`; used as an oracle for `n ≤ 4`.

use super::SquareMatrix;

/// `δ^{upper}_{lower}`: the sign of the permutation taking `lower` to `upper`
/// when `upper` has distinct entries and is a rearrangement of `lower`, else 0.
pub fn generalized_kronecker(upper: &[usize], lower: &[usize]) -> i32 {
    let k = upper.len();
    assert_eq!(k, lower.len());
    let mut perm = vec![usize::MAX; k];
    for (p, u) in upper.iter().enumerate() {
        if upper[..p].contains(u) {
            return 0;
        }
        match lower.iter().position(|l| l == u) {
            Some(q) => perm[p] = q,
            None => return 0,
        }
    }
    let mut seen = vec![false; k];
    let mut sign = 1;
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Index tuples with pairwise distinct entries; every other tuple has a vanishing symbol.
fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(k as u32);
    (0..total).filter_map(move |mut code| {
        let mut t = vec![0; k];
        for slot in t.iter_mut() {
            *slot = code % n;
            code /= n;
        }
        let distinct = (1..k).all(|p| !t[..p].contains(&t[p]));
        distinct.then_some(t)
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// `h_i^j` read from the shape-operator storage `A[j][i]`.
fn h(a: &SquareMatrix, i: usize, j: usize) -> f64 {
    a.as_matrix()[(j, i)]
}

/// `σ_k(A) = (1/k!) δ^{i_1…i_k}_{j_1…j_k} h_{i_1}^{j_1} ⋯ h_{i_k}^{j_k}`.
pub fn sigma_by_kronecker(k: usize, a: &SquareMatrix) -> f64 {
    let n = a.dim();
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let mut total = 0.0;
    for upper in tuples(n, k) {
        for lower in tuples(n, k) {
            let d = generalized_kronecker(&upper, &lower);
            if d != 0 {
                let prod: f64 = upper.iter().zip(&lower).map(|(&i, &j)| h(a, i, j)).product();
                total += d as f64 * prod;
            }
        }
    }
    total / factorial(k)
}

/// `(σ_k)_j^i = (1/(k-1)!) δ^{i_1…i_{k-1} i}_{j_1…j_{k-1} j} h_{i_1}^{j_1} ⋯`, returned
/// as a matrix indexed `[i][j]`.
pub fn newton_tensor_by_kronecker(k: usize, a: &SquareMatrix) -> SquareMatrix {
    let n = a.dim();
    assert!(k >= 1 && k <= n);
    let mut out = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut total = 0.0;
            for upper in tuples(n, k - 1) {
                for lower in tuples(n, k - 1) {
                    let mut up = upper.clone();
                    up.push(i);
                    let mut lo = lower.clone();
                    lo.push(j);
                    let d = generalized_kronecker(&up, &lo);
                    if d != 0 {
                        let prod: f64 = upper.iter().zip(&lower).map(|(&p, &q)| h(a, p, q)).product();
                        total += d as f64 * prod;
                    }
                }
            }
            out[(i, j)] = total / factorial(k - 1);
        }
    }
    SquareMatrix::new(out).expect("finite input gives finite output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_signs() {
        assert_eq!(generalized_kronecker(&[0, 1], &[0, 1]), 1);
        assert_eq!(generalized_kronecker(&[0, 1], &[1, 0]), -1);
        assert_eq!(generalized_kronecker(&[0, 0], &[0, 0]), 0);
        assert_eq!(generalized_kronecker(&[0, 2], &[0, 1]), 0);
        assert_eq!(generalized_kronecker(&[0, 1, 2], &[1, 2, 0]), 1);
        assert_eq!(generalized_kronecker(&[0, 1, 2], &[0, 2, 1]), -1);
    }

    #[test]
    fn principal_minor_sums() {
        let a = SquareMatrix::from_row_slice(3, &[1.0, 2.0, 0.0, 3.0, -1.0, 4.0, 0.5, 1.0, 2.0]).unwrap();
        assert!((sigma_by_kronecker(1, &a) - 2.0).abs() < 1e-14);
        // det = 1(-2-4) - 2(6-2) + 0 = -14
        assert!((sigma_by_kronecker(3, &a) + 14.0).abs() < 1e-12);
    }
}
