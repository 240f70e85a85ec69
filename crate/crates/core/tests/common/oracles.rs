/// Dense Gaussian elimination with partial pivoting; solves `A x = b`.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

pub fn dense_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            dense_solve(a, &e)
        })
        .collect();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// Penalty matrix `K = Q R⁻¹ Qᵀ` of the natural cubic spline with knots `x`,
/// assembled densely from its definition.
pub fn dense_penalty(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let m = n - 2;
    let mut q = vec![vec![0.0; m]; n];
    let mut r = vec![vec![0.0; m]; m];
    for j in 1..n - 1 {
        let k = j - 1;
        q[j - 1][k] = 1.0 / h[j - 1];
        q[j][k] = -1.0 / h[j - 1] - 1.0 / h[j];
        q[j + 1][k] = 1.0 / h[j];
        r[k][k] = (h[j - 1] + h[j]) / 3.0;
        if k + 1 < m {
            r[k][k + 1] = h[j] / 6.0;
            r[k + 1][k] = h[j] / 6.0;
        }
    }
    let rinv = dense_inverse(&r);
    let mut k = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..m {
                    s += q[a][i] * rinv[i][j] * q[b][j];
                }
            }
            k[a][b] = s;
        }
    }
    k
}

/// Smoothing-spline fit by solving `(I + λK) f = y` densely on x normalized to [0,1].
/// Returns `(fitted, smoother diagonal)`.
pub fn dense_spline(x: &[f64], y: &[f64], lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let xs: Vec<f64> = x.iter().map(|v| (v - lo) / (hi - lo)).collect();
    let k = dense_penalty(&xs);
    let n = x.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| lambda * k[i][j] + if i == j { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let f = dense_solve(&a, y);
    let s = dense_inverse(&a);
    let diag = (0..n).map(|i| s[i][i]).collect();
    (f, diag)
}

/// Smoothing-spline fit through the dense system `(R + λQᵀQ) γ = Qᵀy`,
/// `f = y − λQγ`, which avoids forming the ill-conditioned `K` and stays
/// accurate for large `λ·n³`.
pub fn dense_spline_qr_form(x: &[f64], y: &[f64], lambda: f64) -> Vec<f64> {
    let n = x.len();
    let (lo, hi) = (x[0], x[n - 1]);
    let xs: Vec<f64> = x.iter().map(|v| (v - lo) / (hi - lo)).collect();
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let m = n - 2;
    let mut q = vec![vec![0.0; m]; n];
    let mut a = vec![vec![0.0; m]; m];
    for j in 1..n - 1 {
        let k = j - 1;
        q[j - 1][k] = 1.0 / h[j - 1];
        q[j][k] = -1.0 / h[j - 1] - 1.0 / h[j];
        q[j + 1][k] = 1.0 / h[j];
        a[k][k] = (h[j - 1] + h[j]) / 3.0;
        if k + 1 < m {
            a[k][k + 1] = h[j] / 6.0;
            a[k + 1][k] = h[j] / 6.0;
        }
    }
    for r in 0..m {
        for c in 0..m {
            a[r][c] += lambda * (0..n).map(|i| q[i][r] * q[i][c]).sum::<f64>();
        }
    }
    let qty: Vec<f64> = (0..m).map(|c| (0..n).map(|i| q[i][c] * y[i]).sum()).collect();
    let gamma = dense_solve(&a, &qty);
    (0..n)
        .map(|i| y[i] - lambda * (0..m).map(|c| q[i][c] * gamma[c]).sum::<f64>())
        .collect()
}

/// Ordinary least squares line `(intercept, slope)` and hat diagonal.
pub fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let hat = x.iter().map(|v| 1.0 / n + (v - mx) * (v - mx) / sxx).collect();
    (my - slope * mx, slope, hat)
}

/// Check-loss minimum over every line through two observations with distinct
/// x (the LP's vertices). Returns `(objective, beta0, beta1)`.
pub fn qreg_vertex_enumeration(x: &[f64], y: &[f64], tau: f64) -> (f64, f64, f64) {
    let rho = |u: f64| if u < 0.0 { (tau - 1.0) * u } else { tau * u };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if x[i] == x[j] {
                continue;
            }
            let b1 = (y[j] - y[i]) / (x[j] - x[i]);
            let b0 = y[i] - b1 * x[i];
            let obj: f64 = x.iter().zip(y).map(|(a, b)| rho(b - b0 - b1 * a)).sum();
            if obj < best.0 {
                best = (obj, b0, b1);
            }
        }
    }
    best
}

/// Motif counts by exhaustive enumeration of every (survey user, IMP-uncivil
/// influencer post) pair, straight from the records. Returns
/// `[direct, two_step, mixed]`.
pub fn brute_force_motifs(ds: &civiscope::model::Dataset) -> [u64; 3] {
    use civiscope::model::Dimension;
    let follows = |u: &str, v: &str| {
        ds.follows()
            .iter()
            .any(|e| e.follower_id == u && e.followee_id == v)
            && ds.account(v).is_some_and(|a| a.is_influencer)
    };
    let mut c = [0u64; 3];
    for s in ds.survey_users() {
        for p in ds.posts() {
            let Some(author) = ds.account(&p.author_id) else { continue };
            let uncivil = p.machine[Dimension::Imp].is_some_and(|l| l.value);
            if !author.is_influencer || !uncivil || !follows(&s.id, &p.author_id) {
                continue;
            }
            match &p.retweet_of {
                None => c[0] += 1,
                Some(rt) if rt.author_id == p.author_id => c[0] += 1,
                Some(rt) if follows(&s.id, &rt.author_id) => c[2] += 1,
                Some(_) => c[1] += 1,
            }
        }
    }
    c
}

/// Directed configuration-model sample by uniform stub matching: every
/// out-stub is paired with a uniformly permuted in-stub.
pub fn stub_matching_sample(out_deg: &[u64], in_deg: &[u64], rng: &mut impl rand::Rng) -> Vec<(usize, usize)> {
    use rand::seq::SliceRandom;
    let outs: Vec<usize> = out_deg
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d as usize))
        .collect();
    let mut ins: Vec<usize> = in_deg
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d as usize))
        .collect();
    ins.shuffle(rng);
    outs.into_iter().zip(ins).collect()
}

/// PageRank by dense matrix power iteration on the explicit Google matrix.
pub fn dense_pagerank(n: usize, links: &[(usize, usize, f64)], damping: f64) -> Vec<f64> {
    let mut m = vec![vec![0.0; n]; n];
    let mut out = vec![0.0; n];
    for &(f, _, w) in links {
        out[f] += w;
    }
    for &(f, t, w) in links {
        m[t][f] += w / out[f];
    }
    for j in 0..n {
        if out[j] == 0.0 {
            for row in m.iter_mut() {
                row[j] = 1.0 / n as f64;
            }
        }
    }
    let g: Vec<Vec<f64>> = m
        .iter()
        .map(|row| row.iter().map(|x| damping * x + (1.0 - damping) / n as f64).collect())
        .collect();
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = g.iter().map(|row| row.iter().zip(&r).map(|(a, b)| a * b).sum()).collect();
        let diff: f64 = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
        r = next;
        if diff < 1e-15 {
            break;
        }
    }
    r
}
