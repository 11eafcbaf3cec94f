//! Partitions, compositions, sequence pairs and the enumerators behind the
//! flag sums and the triangular family sums.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatError {
    #[error("not a partition: parts must be weakly decreasing ({0})")]
    NotPartition(String),
    #[error("cannot parse `{0}` as a comma-separated list of nonnegative integers")]
    Parse(String),
    #[error("sequence is not nondecreasing: {0:?}")]
    NotNondecreasing(Vec<usize>),
    #[error("sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("last entries differ: {0} vs {1}")]
    MismatchedTops(usize, usize),
    #[error("sequences must be nonempty")]
    Empty,
}

fn parse_list(s: &str) -> Result<Vec<usize>, CombinatError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CombinatError::Parse(s.to_string())))
        .collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// A partition, stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self, CombinatError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(CombinatError::NotPartition(join(&parts)));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    /// Sort the entries of `parts` into a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts).expect("sorted")
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Part `i`, 1-based, zero past the length.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.part(1)
    }

    /// Parts padded with zeros to length `n` (truncating never happens:
    /// `n` below the length is a caller bug).
    pub fn padded(&self, n: usize) -> Vec<usize> {
        assert!(n >= self.len(), "cannot pad {self} to length {n}");
        let mut v = self.0.clone();
        v.resize(n, 0);
        v
    }

    pub fn conjugate(&self) -> Partition {
        let m = self.largest();
        Partition((1..=m).map(|i| self.0.iter().filter(|&&p| p >= i).count()).collect())
    }

    /// n(λ) = Σ (i-1) λ_i.
    pub fn n(&self) -> usize {
        self.0.iter().enumerate().map(|(i, p)| i * p).sum()
    }

    /// m_k(λ).
    pub fn multiplicity(&self, k: usize) -> usize {
        self.0.iter().filter(|&&p| p == k).count()
    }

    /// Cells (i, j), 1-based, in row order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &p)| (1..=p).map(move |j| (i + 1, j)))
    }

    /// Arm and leg lengths of cell (i, j).
    pub fn arm_leg(&self, i: usize, j: usize) -> (usize, usize) {
        let c = self.conjugate();
        (self.part(i) - j, c.part(j) - i)
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// `self / mu` is a horizontal strip: λ_1 ≥ μ_1 ≥ λ_2 ≥ μ_2 ≥ ...
    pub fn is_horizontal_strip_over(&self, mu: &Partition) -> bool {
        if mu.len() > self.len() {
            return false;
        }
        (1..=self.len()).all(|i| self.part(i) >= mu.part(i) && mu.part(i) >= self.part(i + 1))
    }

    /// Dominance order: partial sums of `self` bound those of `other`.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.weight() != other.weight() {
            return false;
        }
        let (mut a, mut b) = (0, 0);
        for i in 1..=self.len().max(other.len()) {
            a += self.part(i);
            b += other.part(i);
            if a < b {
                return false;
            }
        }
        true
    }

    /// All partitions of `n`, in decreasing lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        rec(n, n, &mut cur, &mut out);
        out
    }

    /// Partitions of `n` with at most `len` parts.
    pub fn all_with_max_len(n: usize, len: usize) -> Vec<Partition> {
        Self::all(n).into_iter().filter(|p| p.len() <= len).collect()
    }

    /// All partitions contained in `self`.
    pub fn subpartitions(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(bound: &[usize], prev: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if cur.len() == bound.len() {
                out.push(Partition::new(cur.clone()).expect("decreasing"));
                return;
            }
            let hi = bound[cur.len()].min(prev);
            for p in 0..=hi {
                cur.push(p);
                rec(bound, p, cur, out);
                cur.pop();
            }
        }
        rec(&self.0, usize::MAX, &mut cur, &mut out);
        out
    }
}

impl FromStr for Partition {
    type Err = CombinatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Partition::new(parse_list(s)?)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join(&self.0))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.0))
    }
}

/// Statistics of a partition: n(λ) and the arm/leg of every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stats {
    pub n: usize,
    pub armlegs: BTreeMap<(usize, usize), (usize, usize)>,
}

pub fn stats(lambda: &Partition) -> Stats {
    let armlegs = lambda.cells().map(|(i, j)| ((i, j), lambda.arm_leg(i, j))).collect();
    Stats { n: lambda.n(), armlegs }
}

/// An ordered sequence of nonnegative integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Composition(pub Vec<usize>);

impl Composition {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sorted(&self) -> Partition {
        Partition::from_unsorted(self.0.clone())
    }

    /// All compositions of `w` into exactly `len` nonnegative parts.
    pub fn all(w: usize, len: usize) -> Vec<Composition> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        fn rec(rem: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
            if left == 0 {
                if rem == 0 {
                    out.push(Composition(cur.clone()));
                }
                return;
            }
            let lo = if left == 1 { rem } else { 0 };
            for p in lo..=rem {
                cur.push(p);
                rec(rem - p, left - 1, cur, out);
                cur.pop();
            }
        }
        rec(w, len, &mut cur, &mut out);
        out
    }
}

impl FromStr for Composition {
    type Err = CombinatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Composition(parse_list(s)?))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join(&self.0))
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", join(&self.0))
    }
}

/// Number of pairs j < k with i_j < i_k.
pub fn inversion_number(word: &[usize]) -> usize {
    let mut c = 0;
    for a in 0..word.len() {
        for b in a + 1..word.len() {
            if word[a] < word[b] {
                c += 1;
            }
        }
    }
    c
}

/// Multiplicities m(i) of a word over the alphabet 0..=n: entry c counts
/// occurrences of colour c, for c = 1..=n.
pub fn colour_content(word: &[usize], n: usize) -> Vec<usize> {
    let mut m = vec![0; n];
    for &c in word {
        if c > 0 {
            m[c - 1] += 1;
        }
    }
    m
}

/// A pair of nondecreasing sequences of equal length N with equal last
/// entries. Stored 0-based; `nu(k)` and `nutilde(k)` read them 1-based with
/// the value 0 at k = 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequencePair {
    nu: Vec<usize>,
    nutilde: Vec<usize>,
}

impl SequencePair {
    pub fn new(nu: Vec<usize>, nutilde: Vec<usize>) -> Result<Self, CombinatError> {
        if nu.is_empty() || nutilde.is_empty() {
            return Err(CombinatError::Empty);
        }
        if nu.len() != nutilde.len() {
            return Err(CombinatError::LengthMismatch(nu.len(), nutilde.len()));
        }
        for s in [&nu, &nutilde] {
            if s.windows(2).any(|w| w[0] > w[1]) {
                return Err(CombinatError::NotNondecreasing(s.clone()));
            }
        }
        let (a, b) = (*nu.last().unwrap(), *nutilde.last().unwrap());
        if a != b {
            return Err(CombinatError::MismatchedTops(a, b));
        }
        Ok(SequencePair { nu, nutilde })
    }

    /// Length N.
    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nu_slice(&self) -> &[usize] {
        &self.nu
    }

    pub fn nutilde_slice(&self) -> &[usize] {
        &self.nutilde
    }

    /// ν^k for k in 0..=N.
    pub fn nu(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.nu[k - 1]
        }
    }

    /// ν̃^k for k in 0..=N.
    pub fn nutilde(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.nutilde[k - 1]
        }
    }

    /// Common last entry.
    pub fn top(&self) -> usize {
        *self.nu.last().unwrap()
    }

    /// Every pair with length `n` and entries at most `max`.
    pub fn all(n: usize, max: usize) -> Vec<SequencePair> {
        let seqs = nondecreasing(n, max);
        let mut out = Vec::new();
        for a in &seqs {
            for b in &seqs {
                if a.last() == b.last() {
                    out.push(SequencePair { nu: a.clone(), nutilde: b.clone() });
                }
            }
        }
        out
    }
}

impl fmt::Debug for SequencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", join(&self.nu), join(&self.nutilde))
    }
}

/// Nondecreasing sequences of length `n` with entries in 0..=max.
pub fn nondecreasing(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, lo: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in lo..=max {
            cur.push(v);
            rec(n, v, max, cur, out);
            cur.pop();
        }
    }
    rec(n, 0, max, &mut cur, &mut out);
    out
}

/// A flag ∅ = ν^0 ⊆ ν^1 ⊆ ... ⊆ ν^N, each stored padded to a common length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Flag(pub Vec<Vec<usize>>);

impl Flag {
    /// ν^k_i, with k in 0..=N and i 1-based (0 past the stored length).
    pub fn get(&self, k: usize, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.0[k].get(i - 1).copied().unwrap_or(0)
    }

    pub fn levels(&self) -> usize {
        self.0.len() - 1
    }

    pub fn width(&self) -> usize {
        self.0[0].len()
    }
}

/// Stream every flag from ∅ to λ' in N steps. With `mu`, only flags with
/// |ν^k| = μ_1 + ... + μ_k are produced.
pub fn enumerate_flags<F: FnMut(&Flag)>(lambda: &Partition, n: usize, mu: Option<&[usize]>, mut f: F) {
    let top = lambda.conjugate();
    let w = top.len();
    if let Some(m) = mu {
        if m.len() != n || m.iter().sum::<usize>() != top.weight() {
            return;
        }
    }
    let mut levels: Vec<Vec<usize>> = vec![vec![0; w]; n + 1];
    levels[n] = top.padded(w);
    if n == 0 {
        if top.is_empty() {
            f(&Flag(levels));
        }
        return;
    }
    // Fill ν^{N-1}, ν^{N-2}, ..., ν^1 top-down; ν^0 must be empty.
    fn level<F: FnMut(&Flag)>(
        k: usize,
        levels: &mut Vec<Vec<usize>>,
        mu: Option<&[usize]>,
        f: &mut F,
    ) {
        if k == 0 {
            f(&Flag(levels.clone()));
            return;
        }
        let w = levels[k + 1].len();
        let target = mu.map(|m| m[..k].iter().sum::<usize>());
        let upper = levels[k + 1].clone();
        let mut cur = vec![0; w];
        fill(0, usize::MAX, 0, &upper, target, &mut cur, &mut |c| {
            levels[k].copy_from_slice(c);
            level(k - 1, levels, mu, f);
        });
    }
    fn fill(
        i: usize,
        prev: usize,
        sum: usize,
        upper: &[usize],
        target: Option<usize>,
        cur: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if i == upper.len() {
            if target.is_none_or(|t| t == sum) {
                emit(cur);
            }
            return;
        }
        let hi = upper[i].min(prev);
        for v in 0..=hi {
            if target.is_some_and(|t| sum + v > t) {
                break;
            }
            cur[i] = v;
            fill(i + 1, v, sum + v, upper, target, cur, emit);
        }
        cur[i] = 0;
    }
    level(n - 1, &mut levels, mu, &mut f);
}

pub fn collect_flags(lambda: &Partition, n: usize, mu: Option<&[usize]>) -> Vec<Flag> {
    let mut v = Vec::new();
    enumerate_flags(lambda, n, mu, |fl| v.push(fl.clone()));
    v
}

/// The triangular family ν_{i,j}^k, 1 ≤ i ≤ j ≤ n, 0 ≤ k ≤ N, with
/// ν^0 = 0 and the convention ν_{j+1,j} = 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NuFamily {
    n: usize,
    levels: usize,
    data: Vec<usize>,
}

impl NuFamily {
    fn slot(&self, i: usize, j: usize) -> usize {
        // rows i = 1..n, within a row j = i..n
        let before: usize = (1..i).map(|r| self.n - r + 1).sum();
        (before + (j - i)) * (self.levels + 1)
    }

    /// Number of colours n.
    pub fn colours(&self) -> usize {
        self.n
    }

    /// N.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> usize {
        if i > j || i == 0 || j > self.n {
            return 0;
        }
        self.data[self.slot(i, j) + k]
    }

    /// The sequence (ν_{i,j}^1, ..., ν_{i,j}^N).
    pub fn chain(&self, i: usize, j: usize) -> Vec<usize> {
        (1..=self.levels).map(|k| self.get(i, j, k)).collect()
    }

    /// μ_k = Σ_{i≤j} (ν_{i,j}^k − ν_{i,j}^{k−1}).
    pub fn mu(&self) -> Vec<usize> {
        (1..=self.levels)
            .map(|k| {
                let mut s = 0;
                for i in 1..=self.n {
                    for j in i..=self.n {
                        s += self.get(i, j, k) - self.get(i, j, k - 1);
                    }
                }
                s
            })
            .collect()
    }
}

/// Tops of the family chains: λ'_j − λ'_{j+1} (or λ_j − λ_{j+1} when dual),
/// indexed by j = 1..=n.
pub fn family_tops(lambda: &Partition, dual: bool) -> Vec<usize> {
    let base = if dual { lambda.clone() } else { lambda.conjugate() };
    (1..=base.len()).map(|j| base.part(j) - base.part(j + 1)).collect()
}

/// Stream every family for λ with N levels. The number of colours is λ_1
/// (λ'_1 when `dual`). With `mu` the level sums are fixed.
pub fn enumerate_nu_families<F: FnMut(&NuFamily, &[usize])>(
    lambda: &Partition,
    n_levels: usize,
    dual: bool,
    mu: Option<&[usize]>,
    mut f: F,
) {
    let tops = family_tops(lambda, dual);
    let n = tops.len();
    if let Some(m) = mu {
        if m.len() != n_levels || m.iter().sum::<usize>() != lambda.weight() {
            return;
        }
    }
    if n_levels == 0 {
        return;
    }
    let mut fam = NuFamily { n, levels: n_levels, data: vec![0; n * (n + 1) / 2 * (n_levels + 1)] };
    // chain slots with their top value
    let mut chains: Vec<(usize, usize)> = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            chains.push((fam.slot(i, j), tops[j - 1]));
        }
    }
    let mut mu_buf = vec![0; n_levels];
    level(1, &mut fam, &chains, mu, &mut mu_buf, &mut f);

    fn level<F: FnMut(&NuFamily, &[usize])>(
        k: usize,
        fam: &mut NuFamily,
        chains: &[(usize, usize)],
        mu: Option<&[usize]>,
        mu_buf: &mut Vec<usize>,
        f: &mut F,
    ) {
        let nl = fam.levels;
        if k > nl {
            f(fam, mu_buf);
            return;
        }
        if k == nl {
            let mut s = 0;
            for &(slot, top) in chains {
                fam.data[slot + k] = top;
                s += top - fam.data[slot + k - 1];
            }
            if mu.is_none_or(|m| m[k - 1] == s) {
                mu_buf[k - 1] = s;
                f(fam, mu_buf);
            }
            return;
        }
        let target = mu.map(|m| m[k - 1]);
        distribute(0, 0, k, fam, chains, target, mu, mu_buf, f);
    }

    #[allow(clippy::too_many_arguments)]
    fn distribute<F: FnMut(&NuFamily, &[usize])>(
        c: usize,
        sum: usize,
        k: usize,
        fam: &mut NuFamily,
        chains: &[(usize, usize)],
        target: Option<usize>,
        mu: Option<&[usize]>,
        mu_buf: &mut Vec<usize>,
        f: &mut F,
    ) {
        if c == chains.len() {
            if target.is_none_or(|t| t == sum) {
                mu_buf[k - 1] = sum;
                level(k + 1, fam, chains, mu, mu_buf, f);
            }
            return;
        }
        let (slot, top) = chains[c];
        let prev = fam.data[slot + k - 1];
        let room = top - prev;
        let mut max_inc = room;
        if let Some(t) = target {
            if sum > t {
                return;
            }
            max_inc = max_inc.min(t - sum);
        }
        for d in 0..=max_inc {
            fam.data[slot + k] = prev + d;
            distribute(c + 1, sum + d, k, fam, chains, target, mu, mu_buf, f);
        }
    }
}

pub fn collect_nu_families(
    lambda: &Partition,
    n_levels: usize,
    dual: bool,
    mu: Option<&[usize]>,
) -> Vec<(NuFamily, Vec<usize>)> {
    let mut v = Vec::new();
    enumerate_nu_families(lambda, n_levels, dual, mu, |f, m| v.push((f.clone(), m.to_vec())));
    v
}
