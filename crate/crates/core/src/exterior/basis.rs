//! Canonical basis of `p`-forms: strictly increasing multi-indices, stored as
//! bitmasks and ordered lexicographically.

#[derive(Clone, Debug)]
pub(crate) struct Basis {
    masks: Vec<u32>,
    lookup: Vec<usize>,
}

impl Basis {
    pub(crate) fn new(d: usize, p: usize) -> Self {
        let mut masks = Vec::new();
        let mut current = Vec::with_capacity(p);
        combinations(d, p, 0, &mut current, &mut masks);
        let mut lookup = vec![usize::MAX; 1 << d];
        for (k, &m) in masks.iter().enumerate() {
            lookup[m as usize] = k;
        }
        Self { masks, lookup }
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.masks.len()
    }

    #[inline]
    pub(crate) fn mask(&self, k: usize) -> u32 {
        self.masks[k]
    }

    #[inline]
    pub(crate) fn index(&self, mask: u32) -> usize {
        let k = self.lookup[mask as usize];
        debug_assert!(k != usize::MAX, "mask {mask:b} not in basis");
        k
    }

    pub(crate) fn indices(&self, k: usize) -> Vec<usize> {
        mask_indices(self.masks[k])
    }
}

fn combinations(d: usize, p: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u32>) {
    if current.len() == p {
        out.push(current.iter().fold(0u32, |m, &i| m | (1 << i)));
        return;
    }
    for i in start..d {
        current.push(i);
        combinations(d, p, i + 1, current, out);
        current.pop();
    }
}

pub(crate) fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation that sorts the concatenation of two disjoint
/// increasing index lists `a` then `b`: `(-1)^{#{(i∈a, j∈b) : i > j}}`.
#[inline]
pub(crate) fn shuffle_sign(a: u32, b: u32) -> bool {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 31 { 0 } else { a >> (j + 1) };
        inversions += above.count_ones();
    }
    inversions % 2 == 1
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
