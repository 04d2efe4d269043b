//! NPN canonicalization of small truth tables by exhaustive transform
//! search (input permutation x input complementation x output
//! complementation).

/// One NPN transform. Applied to a function `f`, it produces
/// `g(x) = f(y) ^ output_neg` where `y_i = x[perm[i]] ^ input_neg[i]`:
/// input `i` of `f` is wired to input `perm[i]` of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NpnTransform {
    pub perm: [u8; 4],
    pub input_neg: u8,
    pub output_neg: bool,
}

impl NpnTransform {
    pub fn identity() -> Self {
        NpnTransform { perm: [0, 1, 2, 3], input_neg: 0, output_neg: false }
    }

    pub fn apply(&self, table: u16, k: usize) -> u16 {
        let mask = table_mask(k);
        let mut out = 0u16;
        for m in 0..(1u32 << k) {
            let mut y = 0u32;
            for i in 0..k {
                let bit = (m >> self.perm[i] & 1) ^ (self.input_neg as u32 >> i & 1);
                y |= bit << i;
            }
            if (table >> y) & 1 != 0 {
                out |= 1 << m;
            }
        }
        if self.output_neg {
            out = !out;
        }
        out & mask
    }

    /// The transform that maps `apply(self, f)` back to `f`.
    pub fn invert(&self, k: usize) -> NpnTransform {
        let mut perm = [0u8; 4];
        let mut input_neg = 0u8;
        for (i, &p) in self.perm.iter().enumerate().take(k) {
            perm[p as usize] = i as u8;
            if self.input_neg >> i & 1 != 0 {
                input_neg |= 1 << p;
            }
        }
        for (i, p) in perm.iter_mut().enumerate().skip(k) {
            *p = i as u8;
        }
        NpnTransform { perm, input_neg, output_neg: self.output_neg }
    }
}

pub fn table_mask(k: usize) -> u16 {
    if k >= 4 { 0xffff } else { ((1u32 << (1 << k)) - 1) as u16 }
}

fn permutations(k: usize) -> Vec<[u8; 4]> {
    let mut items: Vec<u8> = (0..k as u8).collect();
    let mut out = Vec::new();
    heap_permute(&mut items, k, &mut out);
    out
}

fn heap_permute(items: &mut Vec<u8>, n: usize, out: &mut Vec<[u8; 4]>) {
    if n <= 1 {
        let mut p = [0u8, 1, 2, 3];
        for (i, &v) in items.iter().enumerate() {
            p[i] = v;
        }
        out.push(p);
        return;
    }
    for i in 0..n {
        heap_permute(items, n - 1, out);
        if n.is_multiple_of(2) {
            items.swap(i, n - 1);
        } else {
            items.swap(0, n - 1);
        }
    }
}

/// The lexicographically smallest table in the NPN class of `table`,
/// together with one transform that reaches it. The search order is fixed,
/// so the returned transform is deterministic.
pub fn npn_canonicalize(table: u16, k: usize) -> (u16, NpnTransform) {
    assert!(k <= 4, "tables are 16-bit; k must be at most 4");
    let mask = table_mask(k);
    let table = table & mask;
    let mut best = u16::MAX;
    let mut best_t = NpnTransform::identity();
    for perm in permutations(k.max(1)) {
        for input_neg in 0..(1u8 << k) {
            for output_neg in [false, true] {
                let t = NpnTransform { perm, input_neg, output_neg };
                let candidate = t.apply(table, k);
                if candidate < best {
                    best = candidate;
                    best_t = t;
                }
            }
        }
    }
    (best, best_t)
}
