use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::{Ctx, IdentityReport, LocalConfig};
use crate::error::{Error, Result};
use crate::qseries::{Mismatch, QSeries, Ring};
use crate::rational::Rational;
use crate::shifts::ShiftSet;

/// One factor `(A_j, B_j, alpha_j, beta_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub a: ShiftSet,
    pub b: ShiftSet,
    pub alpha: Rational,
    pub beta: Rational,
}

impl Block {
    pub fn new(a: ShiftSet, b: ShiftSet, alpha: Rational, beta: Rational) -> Self {
        Block { a, b, alpha, beta }
    }

    fn shifts(&self) -> impl Iterator<Item = &Rational> {
        self.a
            .shifts()
            .iter()
            .chain(self.b.shifts())
            .chain([&self.alpha, &self.beta])
    }
}

impl core::fmt::Display for Block {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "A={} B={} alpha={} beta={}", self.a, self.b, self.alpha, self.beta)
    }
}

/// Summed and product forms of `Z(A)` together with their comparison.
#[derive(Clone, Debug)]
pub struct ZedForms {
    pub summed: QSeries,
    pub product: QSeries,
    pub mismatch: Option<Mismatch>,
}

fn half() -> Rational {
    Rational::new(1, 2).unwrap()
}

fn one_minus(r: &Rational) -> Rational {
    &Rational::ONE - r
}

fn neg(r: &Rational) -> Rational {
    -r.clone()
}

/// `acc += sign * Y^e * a * b`, skipping products that cannot reach the cutoff.
fn add_product(acc: &mut QSeries, a: &QSeries, b: &QSeries, e: i64, negate: bool) -> Result<()> {
    let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) else {
        return Ok(());
    };
    if va + vb + e > acc.ring().cutoff {
        return Ok(());
    }
    let mut p = a.mul(b)?;
    if e != 0 {
        p = p.shift(e)?;
    }
    if negate {
        p = p.neg();
    }
    acc.add_assign(&p)
}

// ---------------------------------------------------------------- Z and C

fn cee_ctx(ctx: &mut Ctx, a: &ShiftSet, b: &ShiftSet, ring: Ring) -> Result<QSeries> {
    let bound = ctx.bound(ring);
    let ah = ctx.half(a, ring, bound + 1)?;
    let bh = ctx.half(b, ring, bound + 1)?;
    let mut acc = QSeries::zero(ring);
    for m in 0..=bound {
        add_product(&mut acc, &ah.values()[m], &bh.values()[m], 0, false)?;
    }
    Ok(acc)
}

/// `C(A,B) = sum_M A(M) B(M) X^M`, truncated at `X^{order_x}`.
pub fn cee(a: &ShiftSet, b: &ShiftSet, cfg: &LocalConfig) -> Result<QSeries> {
    let mut ctx = Ctx::new(cfg, a.shifts().iter().chain(b.shifts()))?;
    let ring = ctx.ring(0);
    cee_ctx(&mut ctx, a, b, ring)
}

/// `Z(A)` both as `sum_j A(j) X^j` and as `prod (1 - X^{1+a})^{-1}`.
pub fn zed(a: &ShiftSet, cfg: &LocalConfig) -> Result<ZedForms> {
    let mut ctx = Ctx::new(cfg, a.shifts())?;
    let ring = ctx.ring(0);
    let bound = ctx.bound(ring);
    let arr = ctx.weighted(a, Rational::ONE, ring, bound + 1)?;
    let mut summed = QSeries::zero(ring);
    for v in &arr.values()[..=bound] {
        summed.add_assign(v)?;
    }
    let mut product = QSeries::one(ring);
    for s in a.shifts() {
        let f = QSeries::one(ring).sub(&QSeries::y_pow(ctx.y(&(&Rational::ONE + s))?, ring)?)?;
        product = product.mul(&f.inv()?)?;
    }
    let mismatch = summed.eq_upto(&product, ring.cutoff)?;
    Ok(ZedForms {
        summed,
        product,
        mismatch,
    })
}

// ---------------------------------------------------------------- Sigma blocks

/// Tail sums `S[c] = sum_{c+j < len} A_h(j+c) X^{j w}` for `c < len`.
fn tail_sums(arr: &[QSeries], w: i64, len: usize, ring: Ring) -> Result<Vec<QSeries>> {
    let mut out = vec![QSeries::zero(ring); len + 1];
    for c in (0..len).rev() {
        let next = out[c + 1].shift(w)?;
        out[c] = arr[c].add(&next)?;
    }
    out.truncate(len);
    Ok(out)
}

/// Weighted Sigma factor `G(t) = X^{-t/2} Sigma(M,N) X^{M(1-beta) - N alpha}` with
/// `(M,N) = (t+, t-)`, for every `|t| <= tmax`, by the defining quadruple sum.
fn sigma_table_brute(ctx: &mut Ctx, blk: &Block, ring: Ring, tmax: usize) -> Result<Vec<QSeries>> {
    let bound = ctx.bound(ring);
    let dmax = bound + tmax;
    let len = dmax + 2 + bound + 1;
    let ah = ctx.half(&blk.a, ring, len)?;
    let bh = ctx.half(&blk.b, ring, len)?;
    let ea = ctx.y(&(&half() - &blk.alpha))?;
    let eb = ctx.y(&(&half() - &blk.beta))?;
    let eq = ctx.y(&one_minus(&(&blk.alpha + &blk.beta)))?;
    let mut sa = tail_sums(&ah.values()[..len], ea, len, ring)?;
    let mut sb = tail_sums(&bh.values()[..len], eb, len, ring)?;
    sa.truncate(dmax + 2);
    sb.truncate(dmax + 2);
    let mut out = Vec::with_capacity(2 * tmax + 1);
    for i in 0..=2 * tmax {
        let t = i as i64 - tmax as i64;
        let (m, n) = (t.max(0) as usize, (-t).max(0) as usize);
        let mut acc = QSeries::zero(ring);
        for d in 0..=bound + m.max(n) {
            for q in 0..=1usize {
                let (mm, mn) = ((q + d).min(m), (q + d).min(n));
                let e = q as i64 * eq + (n - mn) as i64 * ea + (m - mm) as i64 * eb;
                add_product(&mut acc, &sa[q + d - mn], &sb[q + d - mm], e, q == 1)?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Same table from the three-term closed form.
fn sigma_table_closed(ctx: &mut Ctx, blk: &Block, ring: Ring, tmax: usize, mirrored_zero: bool) -> Result<Vec<QSeries>> {
    let bound = ctx.bound(ring);
    let len = bound + tmax + 1;
    let a_aug = blk.a.union(&[neg(&blk.beta)])?;
    let b_aug = blk.b.union(&[neg(&blk.alpha)])?;
    let ah = ctx.half(&blk.a, ring, len)?;
    let bh = ctx.half(&blk.b, ring, len)?;
    let aah = ctx.half(&a_aug, ring, len)?;
    let bah = ctx.half(&b_aug, ring, len)?;
    let (ah, bh, aah, bah) = (ah.values(), bh.values(), aah.values(), bah.values());
    let mut out = Vec::with_capacity(2 * tmax + 1);
    for i in 0..=2 * tmax {
        let t = i as i64 - tmax as i64;
        let mut acc = QSeries::zero(ring);
        let use_m_form = t > 0 || (t == 0 && !mirrored_zero);
        let s = t.unsigned_abs() as usize;
        for k in 0..=bound {
            if use_m_form {
                add_product(&mut acc, &bah[k], &ah[k + s], 0, false)?;
                add_product(&mut acc, &bh[k], &ah[k + s], 0, true)?;
                add_product(&mut acc, &bh[k], &aah[k + s], 0, false)?;
            } else {
                add_product(&mut acc, &aah[k], &bh[k + s], 0, false)?;
                add_product(&mut acc, &ah[k], &bh[k + s], 0, true)?;
                add_product(&mut acc, &ah[k], &bah[k + s], 0, false)?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// `H(t) = sum_K A_h(K+M) B_h(K+N)`, the weighted kappa-block factor.
fn kappa_table(ctx: &mut Ctx, a: &ShiftSet, b: &ShiftSet, ring: Ring, tmax: usize) -> Result<Vec<QSeries>> {
    let bound = ctx.bound(ring);
    let len = bound + tmax + 1;
    let ah = ctx.half(a, ring, len)?;
    let bh = ctx.half(b, ring, len)?;
    let mut out = Vec::with_capacity(2 * tmax + 1);
    for i in 0..=2 * tmax {
        let t = i as i64 - tmax as i64;
        let (m, n) = (t.max(0) as usize, (-t).max(0) as usize);
        let mut acc = QSeries::zero(ring);
        for k in 0..=bound {
            add_product(&mut acc, &ah.values()[k + m], &bh.values()[k + n], 0, false)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `sum over t_1 + ... + t_l = 0` of `prod_j table_j(t_j)`; tables are indexed by `t + tmax`.
fn zero_sum(tables: &[Vec<QSeries>], tmax: usize, ring: Ring) -> Result<QSeries> {
    let ell = tables.len();
    if ell == 0 {
        return Ok(QSeries::one(ring));
    }
    let tm = tmax as i64;
    // partial[s + off] = sum over the processed blocks with total s
    let mut off = tm;
    let mut partial: Vec<QSeries> = tables[0].clone();
    for (j, tab) in tables.iter().enumerate().skip(1) {
        let reach = (ell - 1 - j) as i64 * tm;
        if j == ell - 1 {
            let mut acc = QSeries::zero(ring);
            for (i, g) in tab.iter().enumerate() {
                let t = i as i64 - tm;
                let idx = -t + off;
                if idx >= 0 && (idx as usize) < partial.len() {
                    add_product(&mut acc, &partial[idx as usize], g, 0, false)?;
                }
            }
            return Ok(acc);
        }
        let mut next = vec![QSeries::zero(ring); (2 * reach + 1) as usize];
        for (si, slot) in next.iter_mut().enumerate() {
            let s = si as i64 - reach;
            for (i, g) in tab.iter().enumerate() {
                let t = i as i64 - tm;
                let idx = s - t + off;
                if idx >= 0 && (idx as usize) < partial.len() {
                    add_product(slot, &partial[idx as usize], g, 0, false)?;
                }
            }
        }
        partial = next;
        off = reach;
    }
    // ell == 1: only t = 0 survives
    Ok(partial[off as usize].clone())
}

fn plain_from_weighted(ctx: &Ctx, g: &QSeries, cy: i64) -> Result<QSeries> {
    let d = ctx.denom;
    let wide = Ring::with_floor(d, g.ring().cutoff, -cy);
    let out = Ring::with_floor(d, ctx.cutoff(), -cy);
    g.recast(wide)?.shift(-cy)?.recast(out)
}

fn sigma_plain(blk: &Block, m: usize, n: usize, cfg: &LocalConfig, closed: bool) -> Result<QSeries> {
    if m.min(n) != 0 {
        return Err(Error::InvalidArgument(format!("min(M,N) must be 0, got ({m},{n})")));
    }
    let mut ctx = Ctx::new(cfg, blk.shifts())?;
    let c = &(&Rational::from_int(m as i64) * &(&half() - &blk.beta))
        + &(&Rational::from_int(n as i64) * &(&half() - &blk.alpha));
    let cy = ctx.y(&c)?;
    let ring = ctx.ring(cy);
    let tmax = m.max(n);
    let tab = if closed {
        sigma_table_closed(&mut ctx, blk, ring, tmax, false)?
    } else {
        sigma_table_brute(&mut ctx, blk, ring, tmax)?
    };
    let idx = (m as i64 - n as i64 + tmax as i64) as usize;
    plain_from_weighted(&ctx, &tab[idx], cy)
}

/// `Sigma_{A,B,alpha,beta}(M,N)` by its defining sum over `d, j, k` and `q in {0,1}`.
pub fn sigma_brute(blk: &Block, m: usize, n: usize, cfg: &LocalConfig) -> Result<QSeries> {
    sigma_plain(blk, m, n, cfg, false)
}

/// `Sigma_{A,B,alpha,beta}(M,N)` from the three-term closed form.
pub fn sigma_closed(blk: &Block, m: usize, n: usize, cfg: &LocalConfig) -> Result<QSeries> {
    sigma_plain(blk, m, n, cfg, true)
}

/// Both closed forms at `M = N = 0`: `((M,0)-form, (0,N)-form)`.
pub fn sigma_closed_zero_forms(blk: &Block, cfg: &LocalConfig) -> Result<(QSeries, QSeries)> {
    let mut ctx = Ctx::new(cfg, blk.shifts())?;
    let ring = ctx.ring(0);
    let a = sigma_table_closed(&mut ctx, blk, ring, 0, false)?;
    let b = sigma_table_closed(&mut ctx, blk, ring, 0, true)?;
    Ok((a[0].clone(), b[0].clone()))
}

// ---------------------------------------------------------------- F, Q, Q'

fn check_lists(a: &[ShiftSet], b: &[ShiftSet]) -> Result<()> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidArity(format!("|A_list|={}, |B_list|={}", a.len(), b.len())));
    }
    Ok(())
}

fn eff_ctx(ctx: &mut Ctx, a: &[ShiftSet], b: &[ShiftSet], ring: Ring) -> Result<QSeries> {
    let tmax = ctx.bound(ring);
    let mut tabs = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        tabs.push(kappa_table(ctx, x, y, ring, tmax)?);
    }
    zero_sum(&tabs, tmax, ring)
}

/// `F(A_1..A_l; B_1..B_l)` by brute summation over `(M_i, N_i, K_i)`.
pub fn eff(a: &[ShiftSet], b: &[ShiftSet], cfg: &LocalConfig) -> Result<QSeries> {
    check_lists(a, b)?;
    let mut ctx = Ctx::new(cfg, a.iter().chain(b).flat_map(|s| s.shifts()))?;
    let ring = ctx.ring(0);
    eff_ctx(&mut ctx, a, b, ring)
}

fn union_of(sets: &[&ShiftSet], extra: &[Rational]) -> Result<ShiftSet> {
    ShiftSet::union_all(sets, "")?.union(extra)
}

fn q_ctx(ctx: &mut Ctx, blocks: &[Block], kappa: &[(ShiftSet, ShiftSet)], ring: Ring) -> Result<QSeries> {
    let tmax = ctx.bound(ring);
    let mut tabs = Vec::with_capacity(blocks.len() + kappa.len());
    for blk in blocks {
        tabs.push(sigma_table_brute(ctx, blk, ring, tmax)?);
    }
    for (a, b) in kappa {
        tabs.push(kappa_table(ctx, a, b, ring, tmax)?);
    }
    zero_sum(&tabs, tmax, ring)
}

fn rhs_ctx(ctx: &mut Ctx, blocks: &[Block], kappa: &[(ShiftSet, ShiftSet)], ring: Ring) -> Result<QSeries> {
    let a_sets: Vec<&ShiftSet> = blocks.iter().map(|b| &b.a).chain(kappa.iter().map(|k| &k.0)).collect();
    let b_sets: Vec<&ShiftSet> = blocks.iter().map(|b| &b.b).chain(kappa.iter().map(|k| &k.1)).collect();
    let neg_beta: Vec<Rational> = blocks.iter().map(|b| neg(&b.beta)).collect();
    let neg_alpha: Vec<Rational> = blocks.iter().map(|b| neg(&b.alpha)).collect();
    let ua = union_of(&a_sets, &neg_beta)?;
    let ub = union_of(&b_sets, &neg_alpha)?;
    let mut out = cee_ctx(ctx, &ua, &ub, ring)?;
    for blk in blocks {
        let e = ctx.y(&one_minus(&(&blk.alpha + &blk.beta)))?;
        let f = QSeries::one(ring).sub(&QSeries::y_pow(e, ring)?)?;
        out = out.mul(&f)?;
    }
    Ok(out)
}

fn lemma3_ctx(ctx: &mut Ctx, blocks: &[Block], ring: Ring) -> Result<QSeries> {
    let ell = blocks.len();
    let a_sets: Vec<&ShiftSet> = blocks.iter().map(|b| &b.a).collect();
    let b_sets: Vec<&ShiftSet> = blocks.iter().map(|b| &b.b).collect();
    let mut acc = QSeries::zero(ring);
    // each block is in J1, in J2, or in neither
    for code in 0..3usize.pow(ell as u32) {
        let (mut j1, mut j2, mut c) = (Vec::new(), Vec::new(), code);
        for blk in blocks {
            match c % 3 {
                1 => j1.push(neg(&blk.beta)),
                2 => j2.push(neg(&blk.alpha)),
                _ => {}
            }
            c /= 3;
        }
        let ua = union_of(&a_sets, &j1)?;
        let ub = union_of(&b_sets, &j2)?;
        let term = cee_ctx(ctx, &ua, &ub, ring)?;
        let negate = (ell + j1.len() + j2.len()) % 2 == 1;
        acc.add_assign(&if negate { term.neg() } else { term })?;
    }
    Ok(acc)
}

fn block_ctx(cfg: &LocalConfig, blocks: &[Block], kappa: &[(ShiftSet, ShiftSet)]) -> Result<Ctx> {
    if blocks.is_empty() {
        return Err(Error::InvalidArity("at least one Sigma block is required".into()));
    }
    Ctx::new(
        cfg,
        blocks
            .iter()
            .flat_map(|b| b.shifts())
            .chain(kappa.iter().flat_map(|(a, b)| a.shifts().iter().chain(b.shifts()))),
    )
}

/// `Q`: sum over admissible `(M_j, N_j)` of `prod Sigma_j(M_j,N_j) X^{M_j(1-beta_j) - N_j alpha_j}`.
pub fn q_sum(blocks: &[Block], cfg: &LocalConfig) -> Result<QSeries> {
    let mut ctx = block_ctx(cfg, blocks, &[])?;
    let ring = ctx.ring(0);
    q_ctx(&mut ctx, blocks, &[], ring)
}

/// `prod_j (1 - X^{1-alpha_j-beta_j}) C(A u {-beta_j}, B u {-alpha_j})`.
pub fn theorem2_rhs(blocks: &[Block], cfg: &LocalConfig) -> Result<QSeries> {
    let mut ctx = block_ctx(cfg, blocks, &[])?;
    let ring = ctx.ring(0);
    rhs_ctx(&mut ctx, blocks, &[], ring)
}

/// Signed sum over disjoint `J1, J2` of `C(A u -beta_{J1}, B u -alpha_{J2})`.
pub fn lemma3_expand(blocks: &[Block], cfg: &LocalConfig) -> Result<QSeries> {
    let mut ctx = block_ctx(cfg, blocks, &[])?;
    // the augmented unions must exist even if a particular term does not use them
    let ring = ctx.ring(0);
    rhs_ctx(&mut ctx, blocks, &[], ring)?;
    lemma3_ctx(&mut ctx, blocks, ring)
}

/// `Q'` with Sigma blocks `blocks` and kappa blocks `kappa`.
pub fn qprime_sum(blocks: &[Block], kappa: &[(ShiftSet, ShiftSet)], cfg: &LocalConfig) -> Result<QSeries> {
    let mut ctx = block_ctx(cfg, blocks, kappa)?;
    let ring = ctx.ring(0);
    q_ctx(&mut ctx, blocks, kappa, ring)
}

/// Right side for `Q'`: only the Sigma blocks contribute factors and augmentations.
pub fn theorem4_rhs(blocks: &[Block], kappa: &[(ShiftSet, ShiftSet)], cfg: &LocalConfig) -> Result<QSeries> {
    let mut ctx = block_ctx(cfg, blocks, kappa)?;
    let ring = ctx.ring(0);
    rhs_ctx(&mut ctx, blocks, kappa, ring)
}

// ---------------------------------------------------------------- checks

/// A single identity instance in a form that can be checked and re-run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentityInstance {
    /// `sigma_brute = sigma_closed` for `(M,0)` and `(0,N)` with `M, N <= max_mn`.
    Lemma1 { block: Block, max_mn: usize },
    /// `F = C(union A, union B)`.
    Lemma2 { a: Vec<ShiftSet>, b: Vec<ShiftSet> },
    /// Expansion equals the product form.
    Lemma3 { blocks: Vec<Block> },
    /// `Q` equals the product form.
    Theorem2 { blocks: Vec<Block> },
    /// `Q'` equals its product form; `kappa` holds blocks `l'+1..l`.
    Theorem4 { blocks: Vec<Block>, kappa: Vec<(ShiftSet, ShiftSet)> },
}

impl IdentityInstance {
    pub fn name(&self) -> &'static str {
        match self {
            IdentityInstance::Lemma1 { .. } => "lemma1",
            IdentityInstance::Lemma2 { .. } => "lemma2",
            IdentityInstance::Lemma3 { .. } => "lemma3",
            IdentityInstance::Theorem2 { .. } => "theorem2",
            IdentityInstance::Theorem4 { .. } => "theorem4",
        }
    }

    pub fn ell(&self) -> usize {
        match self {
            IdentityInstance::Lemma1 { .. } => 1,
            IdentityInstance::Lemma2 { a, .. } => a.len(),
            IdentityInstance::Lemma3 { blocks } | IdentityInstance::Theorem2 { blocks } => blocks.len(),
            IdentityInstance::Theorem4 { blocks, kappa } => blocks.len() + kappa.len(),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        match self {
            IdentityInstance::Lemma1 { block, max_mn } => {
                let _ = write!(s, "{block}; M,N<={max_mn}");
            }
            IdentityInstance::Lemma2 { a, b } => {
                for (j, (x, y)) in a.iter().zip(b).enumerate() {
                    let _ = write!(s, "{}A{}={} B{}={}", if j > 0 { "; " } else { "" }, j + 1, x, j + 1, y);
                }
            }
            IdentityInstance::Lemma3 { blocks } | IdentityInstance::Theorem2 { blocks } => {
                for (j, b) in blocks.iter().enumerate() {
                    let _ = write!(s, "{}[{}] {}", if j > 0 { "; " } else { "" }, j + 1, b);
                }
            }
            IdentityInstance::Theorem4 { blocks, kappa } => {
                for (j, b) in blocks.iter().enumerate() {
                    let _ = write!(s, "{}[{}] {}", if j > 0 { "; " } else { "" }, j + 1, b);
                }
                for (j, (x, y)) in kappa.iter().enumerate() {
                    let _ = write!(s, "; [{}] kappa A={} B={}", blocks.len() + j + 1, x, y);
                }
            }
        }
        s
    }

    fn context(&self, cfg: &LocalConfig) -> Result<Ctx> {
        match self {
            IdentityInstance::Lemma1 { block, .. } => Ctx::new(cfg, block.shifts()),
            IdentityInstance::Lemma2 { a, b } => {
                check_lists(a, b)?;
                Ctx::new(cfg, a.iter().chain(b).flat_map(|s| s.shifts()))
            }
            IdentityInstance::Lemma3 { blocks } | IdentityInstance::Theorem2 { blocks } => block_ctx(cfg, blocks, &[]),
            IdentityInstance::Theorem4 { blocks, kappa } => block_ctx(cfg, blocks, kappa),
        }
    }

    /// Every `(left, right)` pair the identity asserts equal.
    fn sides(&self, cfg: &LocalConfig) -> Result<(Ctx, Vec<(QSeries, QSeries)>)> {
        let mut ctx = self.context(cfg)?;
        let ring = ctx.ring(0);
        let pairs = match self {
            IdentityInstance::Lemma1 { block, max_mn } => {
                let mut v = Vec::new();
                for m in 0..=*max_mn {
                    v.push((sigma_brute(block, m, 0, cfg)?, sigma_closed(block, m, 0, cfg)?));
                }
                for n in 1..=*max_mn {
                    v.push((sigma_brute(block, 0, n, cfg)?, sigma_closed(block, 0, n, cfg)?));
                }
                v.push(sigma_closed_zero_forms(block, cfg)?);
                v
            }
            IdentityInstance::Lemma2 { a, b } => {
                let ua = ShiftSet::union_all(&a.iter().collect::<Vec<_>>(), "")?;
                let ub = ShiftSet::union_all(&b.iter().collect::<Vec<_>>(), "")?;
                vec![(eff_ctx(&mut ctx, a, b, ring)?, cee_ctx(&mut ctx, &ua, &ub, ring)?)]
            }
            IdentityInstance::Lemma3 { blocks } => {
                let r = rhs_ctx(&mut ctx, blocks, &[], ring)?;
                vec![(lemma3_ctx(&mut ctx, blocks, ring)?, r)]
            }
            IdentityInstance::Theorem2 { blocks } => {
                let l = q_ctx(&mut ctx, blocks, &[], ring)?;
                vec![(l, rhs_ctx(&mut ctx, blocks, &[], ring)?)]
            }
            IdentityInstance::Theorem4 { blocks, kappa } => {
                let l = q_ctx(&mut ctx, blocks, kappa, ring)?;
                vec![(l, rhs_ctx(&mut ctx, blocks, kappa, ring)?)]
            }
        };
        Ok((ctx, pairs))
    }

    fn report(&self, identity: String, ctx: &Ctx, mismatch: Option<Mismatch>) -> IdentityReport {
        IdentityReport {
            identity,
            instance: self.describe(),
            ell: self.ell(),
            passed: mismatch.is_none(),
            mismatch,
            meta: ctx.meta(ctx.ring(0)),
        }
    }

    /// Compare both sides up to the cutoff.
    pub fn check(&self, cfg: &LocalConfig) -> Result<IdentityReport> {
        let (ctx, pairs) = self.sides(cfg)?;
        let mut first = None;
        for (l, r) in &pairs {
            if let Some(m) = l.eq_upto(r, l.ring().cutoff)? {
                first = Some(m);
                break;
            }
        }
        Ok(self.report(self.name().into(), &ctx, first))
    }

    /// Recompute both sides with every index bound doubled; passes iff
    /// no retained coefficient changes and the identity holds.
    pub fn soundness_witness(&self, cfg: &LocalConfig) -> Result<IdentityReport> {
        let (ctx, base) = self.sides(cfg)?;
        let (_, wide) = self.sides(&cfg.doubled())?;
        let mut first = None;
        'outer: for ((l1, r1), (l2, r2)) in base.iter().zip(&wide) {
            for (x, y) in [(l1, l2), (r1, r2), (l1, r1)] {
                if let Some(m) = x.eq_upto(y, x.ring().cutoff)? {
                    first = Some(m);
                    break 'outer;
                }
            }
        }
        Ok(self.report(format!("{}-witness", self.name()), &ctx, first))
    }
}

pub fn theorem2_check(blocks: &[Block], cfg: &LocalConfig) -> Result<IdentityReport> {
    IdentityInstance::Theorem2 { blocks: blocks.to_vec() }.check(cfg)
}

pub fn theorem4_check(blocks: &[Block], kappa: &[(ShiftSet, ShiftSet)], cfg: &LocalConfig) -> Result<IdentityReport> {
    IdentityInstance::Theorem4 {
        blocks: blocks.to_vec(),
        kappa: kappa.to_vec(),
    }
    .check(cfg)
}
