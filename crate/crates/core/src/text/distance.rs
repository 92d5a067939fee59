use super::compose;

/// Levenshtein distance over arbitrary comparable sequences, using two
/// rolling rows.
pub fn levenshtein_seq<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Character-level Levenshtein distance, counted in code points after
/// canonical composition.
pub fn levenshtein(a: &str, b: &str) -> usize {
    levenshtein_seq(&compose(a), &compose(b))
}

/// Normalized Levenshtein distance: `levenshtein(a, b) / max(|a|, |b|)`,
/// zero when both strings are empty.
pub fn nld(a: &str, b: &str) -> f64 {
    let a = compose(a);
    let b = compose(b);
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein_seq(&a, &b) as f64 / longest as f64
}

/// Optimal string alignment distance (restricted Damerau-Levenshtein):
/// adjacent transpositions count as one edit.
pub fn osa_distance(a: &[char], b: &[char]) -> usize {
    let n = a.len();
    let m = b.len();
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=m {
        d[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    d[n][m]
}
