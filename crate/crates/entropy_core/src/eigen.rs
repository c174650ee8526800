//! Cyclic Jacobi eigensolver for real symmetric 4x4 matrices.

pub type Mat4 = [[f64; 4]; 4];

/// Eigen-decomposition of a symmetric matrix.
///
/// Returns `(values, vectors)` where `vectors[k]` is the unit eigenvector
/// for `values[k]`. Values are unsorted. Only the upper triangle is read.
pub fn symmetric_eigen(m: &Mat4) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = *m;
    for i in 0..4 {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a.iter().flat_map(|r| r.iter()).fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);

    for _sweep in 0..50 {
        let mut off = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = [a[0][0], a[1][1], a[2][2], a[3][3]];
    let mut vectors = [[0.0; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            vectors[k][i] = v[i][k];
        }
    }
    (values, vectors)
}
