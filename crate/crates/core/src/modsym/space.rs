//! Quotient of the free `F_p`-module on `P¹(Z/M)` by the Manin relations,
//! optionally restricted to a sign eigenspace of the star involution.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, is_prime};
use crate::error::{Error, Result};
use crate::linalg::{left_kernel_subspace, DenseMatrix, Fp, SparseMatrix, Subspace};

use super::levels::num_cusps;
use super::p1::P1List;

/// `σ = [[0,-1],[1,0]]`, order 2 on `P¹`.
pub const SIGMA: [i64; 4] = [0, -1, 1, 0];
/// `τ = [[0,-1],[1,-1]]`, order 3 on `P¹`.
pub const TAU: [i64; 4] = [0, -1, 1, -1];
/// `η = [[-1,0],[0,1]]`, inducing the star involution.
pub const ETA: [i64; 4] = [-1, 0, 0, 1];
/// `T = [[1,1],[0,1]]`, whose orbits on `P¹` are the cusps.
const TRANSLATION: [i64; 4] = [1, 1, 0, 1];

/// Which star eigenspace the quotient presents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    /// The full space.
    Zero,
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> i64 {
        match self {
            Sign::Zero => 0,
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Sign::Zero => "0",
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

type SparseVec = Vec<(u32, u32)>;

/// Weight-2 modular symbols for `Γ₀(M)` over `F_p`.
#[derive(Clone, Debug)]
pub struct ModSymSpace {
    level: u64,
    field: Fp,
    sign: Sign,
    p1: P1List,
    /// Index in `P¹` of the Manin symbol chosen for each basis vector.
    basis_reps: Vec<u32>,
    /// CSR rows: expression of every Manin symbol in the basis.
    offsets: Vec<u32>,
    entries: Vec<(u32, u32)>,
    cusps: CuspData,
}

impl ModSymSpace {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p() as u64
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn dim(&self) -> usize {
        self.basis_reps.len()
    }

    pub fn basis_reps(&self) -> &[u32] {
        &self.basis_reps
    }

    /// Manin symbol `(c : d)` of basis vector `b`.
    pub fn basis_symbol(&self, b: usize) -> (u64, u64) {
        self.p1.point(self.basis_reps[b] as usize)
    }

    /// Expression of the Manin symbol with `P¹` index `i` in the basis.
    pub fn to_basis(&self, i: usize) -> &[(u32, u32)] {
        &self.entries[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Expression of `(u : v)` in the basis; empty when it is not a point.
    pub fn symbol(&self, u: i64, v: i64) -> Vec<u32> {
        let mut out = vec![0u32; self.dim()];
        if let Some(i) = self.p1.index(u, v) {
            for &(b, c) in self.to_basis(i) {
                out[b as usize] = c;
            }
        }
        out
    }

    /// Number of cusps of `X₀(M)`.
    pub fn cusp_count(&self) -> usize {
        self.cusps.count
    }

    /// Cusp index of the `P¹` point `i`, i.e. of `g·∞` for `g` with bottom row `i`.
    pub fn cusp_of_point(&self, i: usize) -> usize {
        self.cusps.orbit[i] as usize
    }

    /// Cusp index of the rational `a/c` (`c = 0` meaning `∞`).
    pub fn cusp_of_rational(&self, a: i64, c: i64) -> usize {
        let (g, _, _) = ext_gcd(a, c);
        let (a, c) = (a / g, c / g);
        // a·x + c·y = ±1 gives [[a, -y], [c, x]] in SL₂(Z) up to sign
        let (h, x, _) = ext_gcd(a, c);
        let i = self
            .p1
            .index(c * h, x)
            .expect("bottom row of an SL₂(Z) matrix is a point");
        self.cusp_of_point(i)
    }

    /// Number of cusp classes after the sign identification.
    pub fn cusp_class_count(&self) -> usize {
        self.cusps.class_count
    }

    /// Class and coefficient of a cusp in the signed divisor group.
    pub fn cusp_class(&self, cusp: usize) -> Option<(usize, u32)> {
        self.cusps.class[cusp]
    }

    /// Boundary of basis vector `b` as a vector over cusp classes.
    fn boundary_row(&self, b: usize) -> Vec<u32> {
        let f = self.field;
        let mut row = vec![0u32; self.cusps.class_count];
        let x = self.basis_reps[b] as usize;
        let y = self.p1.act(x, &SIGMA).expect("σ permutes P¹");
        for (pt, coeff) in [(x, 1u32), (y, f.neg(1))] {
            if let Some((cl, e)) = self.cusps.class[self.cusps.orbit[pt] as usize] {
                row[cl] = f.add(row[cl], f.mul(coeff, e));
            }
        }
        row
    }

    /// Boundary map as a `dim × cusp_class_count` matrix (row vectors).
    pub fn boundary_matrix(&self) -> DenseMatrix {
        let rows: Vec<Vec<u32>> = (0..self.dim())
            .into_par_iter()
            .map(|b| self.boundary_row(b))
            .collect();
        DenseMatrix::from_rows(self.cusps.class_count, &rows)
    }

    /// Boundary of an arbitrary element given in basis coordinates.
    pub fn boundary(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0u32; self.cusps.class_count];
        for (b, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.boundary_row(b)) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }

    /// Kernel of the boundary map.
    pub fn cuspidal_subspace(&self) -> Subspace {
        left_kernel_subspace(&self.boundary_matrix(), self.field)
    }

    /// Star involution `(c : d) ↦ (-c : d)` on the basis.
    pub fn star_matrix(&self) -> SparseMatrix {
        let rows = (0..self.dim())
            .map(|b| {
                let i = self
                    .p1
                    .act(self.basis_reps[b] as usize, &ETA)
                    .expect("η permutes P¹");
                self.to_basis(i).to_vec()
            })
            .collect();
        SparseMatrix::new(self.dim(), rows)
    }
}

#[derive(Clone, Debug)]
struct CuspData {
    count: usize,
    orbit: Vec<u32>,
    class_count: usize,
    class: Vec<Option<(usize, u32)>>,
}

fn cusp_data(p1: &P1List, sign: Sign, f: Fp) -> CuspData {
    let n = p1.len();
    let mut orbit = vec![u32::MAX; n];
    let mut count = 0usize;
    for start in 0..n {
        if orbit[start] != u32::MAX {
            continue;
        }
        let mut x = start;
        while orbit[x] == u32::MAX {
            orbit[x] = count as u32;
            x = p1.act(x, &TRANSLATION).expect("translation permutes P¹");
        }
        count += 1;
    }
    let mut conj = vec![usize::MAX; count];
    for i in 0..n {
        let j = p1.act(i, &ETA).expect("η permutes P¹");
        conj[orbit[i] as usize] = orbit[j] as usize;
    }
    let mut class = vec![None; count];
    let mut done = vec![false; count];
    let mut class_count = 0;
    for c in 0..count {
        if done[c] {
            continue;
        }
        let d = conj[c];
        done[c] = true;
        done[d] = true;
        match sign {
            Sign::Zero => {
                class[c] = Some((class_count, 1));
                class_count += 1;
                if d != c {
                    class[d] = Some((class_count, 1));
                    class_count += 1;
                }
            }
            Sign::Plus | Sign::Minus => {
                if d == c && sign == Sign::Minus {
                    continue;
                }
                class[c] = Some((class_count, 1));
                if d != c {
                    class[d] = Some((class_count, f.reduce_i64(sign.value())));
                }
                class_count += 1;
            }
        }
    }
    CuspData {
        count,
        orbit,
        class_count,
        class,
    }
}

/// Builds the space of level `M` over `F_p` with the given sign.
pub fn build_space(m: u64, p: u64, sign: Sign) -> Result<ModSymSpace> {
    if !(2..(1 << 31)).contains(&m) {
        return Err(Error::InvalidArgument(format!("level {m} out of range")));
    }
    if !is_prime(p) || !(5..(1 << 16)).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "coefficient prime {p} must be a prime in [5, 65536)"
        )));
    }
    let f = Fp::new(p);
    let p1 = P1List::new(m);
    let n = p1.len();
    let sigma: Vec<u32> = (0..n).map(|i| p1.act(i, &SIGMA).unwrap() as u32).collect();
    let eta: Vec<u32> = (0..n).map(|i| p1.act(i, &ETA).unwrap() as u32).collect();

    // two-term relations x = -xσ and, with a sign, x = s·xη
    let s = sign.value();
    let mut gen_of: Vec<Option<(u32, i64)>> = vec![None; n];
    let mut gen_rep: Vec<u32> = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut local: Vec<(usize, i64)> = vec![(start, 1)];
        let mut conflict = false;
        let mut head = 0;
        while head < local.len() {
            let (x, e) = local[head];
            head += 1;
            let mut nbrs = vec![(sigma[x] as usize, -e)];
            if s != 0 {
                nbrs.push((eta[x] as usize, s * e));
            }
            for (y, ey) in nbrs {
                if let Some(&(_, prev)) = local.iter().find(|(z, _)| *z == y) {
                    if prev != ey {
                        conflict = true;
                    }
                } else {
                    seen[y] = true;
                    local.push((y, ey));
                }
            }
        }
        if conflict {
            continue;
        }
        let id = gen_rep.len() as u32;
        gen_rep.push(start as u32);
        for (x, e) in local {
            gen_of[x] = Some((id, e));
        }
    }
    let ngens = gen_rep.len();

    // three-term relations x + xτ + xτ² = 0 over the generators
    let mut relations: Vec<SparseVec> = Vec::new();
    let mut known: HashSet<SparseVec> = HashSet::new();
    let mut in_orbit = vec![false; n];
    for x in 0..n {
        if in_orbit[x] {
            continue;
        }
        let y = p1.act(x, &TAU).unwrap();
        let z = p1.act(y, &TAU).unwrap();
        in_orbit[x] = true;
        in_orbit[y] = true;
        in_orbit[z] = true;
        let mut acc: Vec<(u32, i64)> = Vec::with_capacity(3);
        for pt in [x, y, z] {
            if let Some((g, e)) = gen_of[pt] {
                match acc.iter_mut().find(|(h, _)| *h == g) {
                    Some(slot) => slot.1 += e,
                    None => acc.push((g, e)),
                }
            }
        }
        let mut rel: SparseVec = acc
            .into_iter()
            .map(|(g, e)| (g, f.reduce_i64(e)))
            .filter(|&(_, c)| c != 0)
            .collect();
        if rel.is_empty() {
            continue;
        }
        rel.sort_unstable();
        let lead = f.inv(rel[0].1);
        let normalized: SparseVec = rel.iter().map(|&(g, c)| (g, f.mul(c, lead))).collect();
        if known.insert(normalized.clone()) {
            relations.push(normalized);
        }
    }

    let (live, exprs) = eliminate(ngens, &relations, f);
    let mut basis_index = vec![u32::MAX; ngens];
    for (i, &g) in live.iter().enumerate() {
        basis_index[g as usize] = i as u32;
    }
    let basis_reps: Vec<u32> = live.iter().map(|&g| gen_rep[g as usize]).collect();

    let mut offsets = Vec::with_capacity(n + 1);
    let mut entries = Vec::new();
    offsets.push(0u32);
    for slot in gen_of.iter().take(n) {
        if let Some((g, e)) = *slot {
            let e = f.reduce_i64(e);
            match &exprs[g as usize] {
                None => entries.push((basis_index[g as usize], e)),
                Some(ex) => {
                    let mut row: SparseVec = ex
                        .iter()
                        .map(|&(h, c)| (basis_index[h as usize], f.mul(c, e)))
                        .collect();
                    row.sort_unstable();
                    entries.extend(row);
                }
            }
        }
        offsets.push(entries.len() as u32);
    }
    let cusps = cusp_data(&p1, sign, f);
    debug_assert_eq!(cusps.count as u64, num_cusps(m));
    Ok(ModSymSpace {
        level: m,
        field: f,
        sign,
        p1,
        basis_reps,
        offsets,
        entries,
        cusps,
    })
}

/// Sparse elimination of `relations` over `ngens` generators. Returns the
/// surviving generators (the quotient basis) and, for every eliminated
/// generator, its expression in surviving generators.
///
/// Relations are processed leaves-first along a breadth-first ordering of the
/// graph in which two relations are adjacent when they share a generator, and
/// each pivot is the generator least referenced by earlier expressions, which
/// keeps fill-in near the ordering tree.
fn eliminate(ngens: usize, relations: &[SparseVec], f: Fp) -> (Vec<u32>, Vec<Option<SparseVec>>) {
    let mut uses: Vec<Vec<u32>> = vec![Vec::new(); ngens];
    for (r, rel) in relations.iter().enumerate() {
        for &(g, _) in rel {
            uses[g as usize].push(r as u32);
        }
    }
    let order = {
        let mut visited = vec![false; relations.len()];
        let mut order = Vec::with_capacity(relations.len());
        for root in 0..relations.len() {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(r) = queue.pop_front() {
                order.push(r);
                for &(g, _) in &relations[r] {
                    for &q in &uses[g as usize] {
                        if !visited[q as usize] {
                            visited[q as usize] = true;
                            queue.push_back(q as usize);
                        }
                    }
                }
            }
        }
        order.reverse();
        order
    };
    let mut remaining: Vec<u32> = uses.iter().map(|u| u.len() as u32).collect();
    let mut expr: Vec<Option<SparseVec>> = vec![None; ngens];
    let mut occ: Vec<Vec<u32>> = vec![Vec::new(); ngens];
    let mut scratch = vec![0u32; ngens];
    let mut touched: Vec<u32> = Vec::new();
    for r in order {
        let rel = &relations[r];
        for &(g, _) in rel {
            remaining[g as usize] -= 1;
        }
        // substitute eliminated generators
        for &(g, c) in rel {
            match &expr[g as usize] {
                None => accumulate(&mut scratch, &mut touched, g, c, f),
                Some(ex) => {
                    for &(h, d) in ex {
                        accumulate(&mut scratch, &mut touched, h, f.mul(c, d), f);
                    }
                }
            }
        }
        let mut v: SparseVec = touched
            .drain(..)
            .filter_map(|g| {
                let c = std::mem::take(&mut scratch[g as usize]);
                (c != 0).then_some((g, c))
            })
            .collect();
        if v.is_empty() {
            continue;
        }
        v.sort_unstable();
        let &(pivot, pc) = v
            .iter()
            .min_by_key(|&&(g, _)| (occ[g as usize].len(), remaining[g as usize], g))
            .expect("nonempty");
        // pivot = -(1/pc)·Σ_{others} c·g
        let scale = f.neg(f.inv(pc));
        let e: SparseVec = v
            .iter()
            .filter(|&&(g, _)| g != pivot)
            .map(|&(g, c)| (g, f.mul(c, scale)))
            .collect();
        let holders = std::mem::take(&mut occ[pivot as usize]);
        for h in holders {
            let Some(old) = expr[h as usize].take() else {
                continue;
            };
            let Some(&(_, a)) = old.iter().find(|&&(g, _)| g == pivot) else {
                expr[h as usize] = Some(old);
                continue;
            };
            let (merged, added) = merge_substitute(&old, pivot, a, &e, f);
            for g in added {
                occ[g as usize].push(h);
            }
            expr[h as usize] = Some(merged);
        }
        for &(g, _) in &e {
            occ[g as usize].push(pivot);
        }
        expr[pivot as usize] = Some(e);
    }
    let live: Vec<u32> = (0..ngens as u32)
        .filter(|&g| expr[g as usize].is_none())
        .collect();
    (live, expr)
}

#[inline]
fn accumulate(scratch: &mut [u32], touched: &mut Vec<u32>, g: u32, c: u32, f: Fp) {
    let slot = &mut scratch[g as usize];
    if *slot == 0 {
        touched.push(g);
    }
    *slot = f.add(*slot, c);
    // a slot that returns to zero stays in `touched`; it is filtered later
}

/// Replaces the term `a·pivot` of `old` by `a·e`; both inputs sorted. Returns
/// the merged vector and the generators newly present.
fn merge_substitute(
    old: &SparseVec,
    pivot: u32,
    a: u32,
    e: &SparseVec,
    f: Fp,
) -> (SparseVec, Vec<u32>) {
    let mut out = Vec::with_capacity(old.len() + e.len());
    let mut added = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < e.len() {
        let oi = old.get(i).map(|x| x.0).unwrap_or(u32::MAX);
        let ej = e.get(j).map(|x| x.0).unwrap_or(u32::MAX);
        if oi == pivot {
            i += 1;
            continue;
        }
        if oi < ej {
            out.push(old[i]);
            i += 1;
        } else if ej < oi {
            let c = f.mul(a, e[j].1);
            if c != 0 {
                out.push((ej, c));
                added.push(ej);
            }
            j += 1;
        } else {
            let c = f.add(old[i].1, f.mul(a, e[j].1));
            if c != 0 {
                out.push((oi, c));
            }
            i += 1;
            j += 1;
        }
    }
    (out, added)
}
