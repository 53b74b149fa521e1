//! Certificates: rings, maps, matrices and the identities claimed between
//! them, in a line-oriented text format headed `srpb/1`.
//!
//! ```text
//! srpb/1
//! command extend
//! ring R0 Q 2 1 grevlex 0,1
//! x0*x1
//! node N0 base - constant idempotent
//! matrix M0 N0 R0 1 1
//! 1
//! claim N0 idempotent R0 M0
//! end
//! ```
//!
//! Rings, homs and matrices carry one expression per line after their
//! header line. Everything else is one record per line.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::polycore::{Field, Monomial, OrderKind, PolyContext, PolyMatrix, Polynomial, TermOrder};
use crate::quotient::{FiberSquare, QuotientRing, RingHom};

pub const HEADER: &str = "srpb/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Base,
    Decompose,
    Glue,
    Lift,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Base => "base",
            NodeKind::Decompose => "decompose",
            NodeKind::Glue => "glue",
            NodeKind::Lift => "lift",
        }
    }

    fn parse(s: &str) -> Option<NodeKind> {
        [NodeKind::Base, NodeKind::Decompose, NodeKind::Glue, NodeKind::Lift]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareRecord {
    pub apex: usize,
    /// `A, A1, A2, A0`.
    pub rings: [usize; 4],
    /// `i1, i2, j1, j2, section`.
    pub homs: [usize; 5],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRecord {
    pub node: usize,
    pub ring: usize,
    pub matrix: PolyMatrix,
}

/// An identity between recorded objects. Ring, hom, square and matrix
/// fields are indices into the certificate tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// Every source generator maps to zero.
    Hom { hom: usize },
    /// Maps connect the rings, the square commutes and the section splits `j2`.
    Square { square: usize },
    /// `E·E = E`.
    Idempotent { ring: usize, e: usize },
    /// `rank E(0) = rank` and `trace E(0) = rank`.
    Rank { ring: usize, e: usize, rank: usize },
    /// The four isomorphism laws.
    ModIso { ring: usize, source: usize, target: usize, forward: usize, backward: usize },
    /// `A·B = I = B·A`.
    Inverse { ring: usize, a: usize, b: usize },
    /// `h(from) = to`.
    Restrict { hom: usize, from: usize, to: usize },
    /// `out = left · right`.
    Product { ring: usize, out: usize, left: usize, right: usize },
    /// `out = left + right`.
    Sum { ring: usize, out: usize, left: usize, right: usize },
    /// `out = ofᵀ`.
    Transpose { out: usize, of: usize },
    /// `out = of(0)`.
    Augment { out: usize, of: usize },
    /// `E = I − wᵀ·v`.
    Kernel { ring: usize, e: usize, v: usize, w: usize },
    /// `v·wᵀ = 1`.
    Unimodular { ring: usize, v: usize, w: usize },
    /// `U·U⁻¹ = I` over the source of `hom` and `hom(U) = σ ⊕ σ⁻¹`.
    Whitehead { hom: usize, u: usize, u_inv: usize, sigma: usize, sigma_inv: usize },
    /// `hom(Δ) = σ` and `Δ·Δ⁻¹ = I = Δ⁻¹·Δ`.
    Lift { hom: usize, delta: usize, delta_inv: usize, sigma: usize },
    /// `i1(m) = m1` and `i2(m) = m2`.
    Glue { square: usize, m: usize, m1: usize, m2: usize },
    /// `stated = m`, where `stated` is a private copy of a command input.
    Statement { stated: usize, m: usize },
}

impl Claim {
    pub fn name(&self) -> &'static str {
        match self {
            Claim::Hom { .. } => "hom",
            Claim::Square { .. } => "square",
            Claim::Idempotent { .. } => "idempotent",
            Claim::Rank { .. } => "rank",
            Claim::ModIso { .. } => "modiso",
            Claim::Inverse { .. } => "inverse",
            Claim::Restrict { .. } => "restrict",
            Claim::Product { .. } => "product",
            Claim::Sum { .. } => "sum",
            Claim::Transpose { .. } => "transpose",
            Claim::Augment { .. } => "augment",
            Claim::Kernel { .. } => "kernel",
            Claim::Unimodular { .. } => "unimodular",
            Claim::Whitehead { .. } => "whitehead",
            Claim::Lift { .. } => "lift",
            Claim::Glue { .. } => "glue",
            Claim::Statement { .. } => "statement",
        }
    }

    /// The matrices the claim constrains.
    pub fn matrices(&self) -> Vec<usize> {
        match *self {
            Claim::Hom { .. } | Claim::Square { .. } => vec![],
            Claim::Idempotent { e, .. } | Claim::Rank { e, .. } => vec![e],
            Claim::ModIso { source, target, forward, backward, .. } => vec![source, target, forward, backward],
            Claim::Inverse { a, b, .. } => vec![a, b],
            Claim::Restrict { from, to, .. } => vec![from, to],
            Claim::Product { out, left, right, .. } | Claim::Sum { out, left, right, .. } => vec![out, left, right],
            Claim::Transpose { out, of } | Claim::Augment { out, of } => vec![out, of],
            Claim::Kernel { e, v, w, .. } => vec![e, v, w],
            Claim::Unimodular { v, w, .. } => vec![v, w],
            Claim::Whitehead { u, u_inv, sigma, sigma_inv, .. } => vec![u, u_inv, sigma, sigma_inv],
            Claim::Lift { delta, delta_inv, sigma, .. } => vec![delta, delta_inv, sigma],
            Claim::Glue { m, m1, m2, .. } => vec![m, m1, m2],
            Claim::Statement { stated, m } => vec![stated, m],
        }
    }

    fn args(&self) -> String {
        let r = |i: usize| format!("R{i}");
        let h = |i: usize| format!("H{i}");
        let s = |i: usize| format!("S{i}");
        let m = |i: usize| format!("M{i}");
        match *self {
            Claim::Hom { hom } => h(hom),
            Claim::Square { square } => s(square),
            Claim::Idempotent { ring, e } => format!("{} {}", r(ring), m(e)),
            Claim::Rank { ring, e, rank } => format!("{} {} {rank}", r(ring), m(e)),
            Claim::ModIso { ring, source, target, forward, backward } => {
                format!("{} {} {} {} {}", r(ring), m(source), m(target), m(forward), m(backward))
            }
            Claim::Inverse { ring, a, b } => format!("{} {} {}", r(ring), m(a), m(b)),
            Claim::Restrict { hom, from, to } => format!("{} {} {}", h(hom), m(from), m(to)),
            Claim::Product { ring, out, left, right } | Claim::Sum { ring, out, left, right } => {
                format!("{} {} {} {}", r(ring), m(out), m(left), m(right))
            }
            Claim::Transpose { out, of } | Claim::Augment { out, of } => format!("{} {}", m(out), m(of)),
            Claim::Kernel { ring, e, v, w } => format!("{} {} {} {}", r(ring), m(e), m(v), m(w)),
            Claim::Unimodular { ring, v, w } => format!("{} {} {}", r(ring), m(v), m(w)),
            Claim::Whitehead { hom, u, u_inv, sigma, sigma_inv } => {
                format!("{} {} {} {} {}", h(hom), m(u), m(u_inv), m(sigma), m(sigma_inv))
            }
            Claim::Lift { hom, delta, delta_inv, sigma } => {
                format!("{} {} {} {}", h(hom), m(delta), m(delta_inv), m(sigma))
            }
            Claim::Glue { square, m: g, m1, m2 } => format!("{} {} {} {}", s(square), m(g), m(m1), m(m2)),
            Claim::Statement { stated, m: x } => format!("{} {}", m(stated), m(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimRecord {
    pub node: usize,
    pub claim: Claim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObligationKind {
    Extend,
    StableExtend,
    Cancel,
}

impl ObligationKind {
    pub fn name(self) -> &'static str {
        match self {
            ObligationKind::Extend => "extend",
            ObligationKind::StableExtend => "stable-extend",
            ObligationKind::Cancel => "cancel",
        }
    }

    fn parse(s: &str) -> Option<ObligationKind> {
        [ObligationKind::Extend, ObligationKind::StableExtend, ObligationKind::Cancel]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

/// An unresolved base case: a module over a ring isomorphic to the
/// polynomial ring in `vars` (all other variables are zero in `ring`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationRecord {
    pub node: usize,
    pub kind: ObligationKind,
    pub ring: usize,
    pub module: usize,
    pub vars: Vec<usize>,
    pub detail: String,
}

/// Hypotheses of the theorems behind an engine run. Advisory only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisProfile {
    pub characteristic: u64,
    pub rank: usize,
    /// Finite characteristic not dividing `rank!`.
    pub char_prime_to_rank_factorial: bool,
    /// `rank ≥ d/2 + 2` with `d = 0` for field bases.
    pub rank_bound: bool,
}

impl HypothesisProfile {
    pub fn new(field: Field, rank: usize) -> HypothesisProfile {
        let p = field.characteristic();
        HypothesisProfile {
            characteristic: p,
            rank,
            char_prime_to_rank_factorial: p != 0 && p as u128 > rank as u128,
            rank_bound: rank >= 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Certificate {
    pub command: String,
    pub rings: Vec<QuotientRing>,
    pub homs: Vec<(usize, usize, RingHom)>,
    pub squares: Vec<SquareRecord>,
    pub nodes: Vec<Node>,
    pub matrices: Vec<MatrixRecord>,
    pub claims: Vec<ClaimRecord>,
    pub obligations: Vec<ObligationRecord>,
    pub profile: Option<HypothesisProfile>,
    pub outputs: Vec<(String, usize)>,
}

fn order_text(ctx: &PolyContext) -> String {
    let kind = match ctx.order().kind() {
        OrderKind::Grevlex => "grevlex",
        OrderKind::Lex => "lex",
    };
    let prec: Vec<String> = ctx.order().precedence().iter().map(|v| v.to_string()).collect();
    format!("{kind} {}", prec.join(","))
}

impl Certificate {
    pub fn output(&self, name: &str) -> Option<&PolyMatrix> {
        self.outputs
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, id)| &self.matrices[id].matrix)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "{HEADER}").unwrap();
        if !self.command.is_empty() {
            writeln!(w, "command {}", self.command).unwrap();
        }
        for (i, ring) in self.rings.iter().enumerate() {
            let gens = ring.generator_polys();
            writeln!(w, "ring R{i} {} {} {} {}", ring.field(), ring.nvars(), gens.len(), order_text(ring.ctx())).unwrap();
            for g in gens {
                writeln!(w, "{g}").unwrap();
            }
        }
        for (i, (s, t, h)) in self.homs.iter().enumerate() {
            writeln!(w, "hom H{i} R{s} R{t}").unwrap();
            for p in h.images() {
                writeln!(w, "{p}").unwrap();
            }
        }
        for (i, sq) in self.squares.iter().enumerate() {
            let [a, a1, a2, a0] = sq.rings;
            let [i1, i2, j1, j2, s] = sq.homs;
            writeln!(w, "square S{i} {} R{a} R{a1} R{a2} R{a0} H{i1} H{i2} H{j1} H{j2} H{s}", sq.apex).unwrap();
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let parent = n.parent.map_or("-".to_string(), |p| format!("N{p}"));
            writeln!(w, "node N{i} {} {parent} {}", n.kind.name(), n.label).unwrap();
        }
        for (i, m) in self.matrices.iter().enumerate() {
            writeln!(w, "matrix M{i} N{} R{} {} {}", m.node, m.ring, m.matrix.rows(), m.matrix.cols()).unwrap();
            for p in m.matrix.entries() {
                writeln!(w, "{p}").unwrap();
            }
        }
        for c in &self.claims {
            writeln!(w, "claim N{} {} {}", c.node, c.claim.name(), c.claim.args()).unwrap();
        }
        for o in &self.obligations {
            let vars: Vec<String> = o.vars.iter().map(|v| v.to_string()).collect();
            let vars = if vars.is_empty() { "-".to_string() } else { vars.join(",") };
            writeln!(w, "obligation N{} {} R{} M{} {vars} {}", o.node, o.kind.name(), o.ring, o.module, o.detail).unwrap();
        }
        if let Some(p) = &self.profile {
            writeln!(
                w,
                "profile {} {} {} {}",
                p.characteristic, p.rank, p.char_prime_to_rank_factorial, p.rank_bound
            )
            .unwrap();
        }
        for (name, id) in &self.outputs {
            writeln!(w, "output {name} M{id}").unwrap();
        }
        writeln!(w, "end").unwrap();
        out
    }

    pub fn parse(text: &str) -> Result<Certificate> {
        Reader::new(text).read()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Input(format!("certificate line {line}: {}", msg.into()))
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Reader<'a> {
        Reader {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos)?;
        self.pos += 1;
        Some((self.pos, l))
    }

    fn expression(&mut self, ctx: &crate::polycore::Ctx) -> Result<Polynomial> {
        let (n, l) = self.next_line().ok_or_else(|| bad(self.pos, "unexpected end of certificate"))?;
        Polynomial::parse(l, ctx).map_err(|e| bad(n, e.to_string()))
    }

    fn read(mut self) -> Result<Certificate> {
        match self.next_line() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(bad(1, format!("missing {HEADER} header"))),
        }
        let mut c = Certificate::default();
        let mut ended = false;
        while let Some((n, line)) = self.next_line() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if ended {
                return Err(bad(n, "content after end"));
            }
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            let tok: Vec<&str> = rest.split_whitespace().collect();
            match head {
                "command" => c.command = rest.to_string(),
                "ring" => {
                    check_id(n, tok.first(), 'R', c.rings.len())?;
                    if tok.len() != 6 {
                        return Err(bad(n, "ring needs: id field vars gens order precedence"));
                    }
                    let field = Field::parse(tok[1]).map_err(|e| bad(n, e.to_string()))?;
                    let nvars = num(n, tok[2])?;
                    let ngens = num(n, tok[3])?;
                    let kind = match tok[4] {
                        "grevlex" => OrderKind::Grevlex,
                        "lex" => OrderKind::Lex,
                        other => return Err(bad(n, format!("unknown order {other}"))),
                    };
                    let prec = tok[5]
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| num(n, s))
                        .collect::<Result<Vec<_>>>()?;
                    let order = TermOrder::with_precedence(kind, prec).ok_or_else(|| bad(n, "bad precedence"))?;
                    let ctx = PolyContext::with_order(nvars, field, order).map_err(|e| bad(n, e.to_string()))?;
                    let mut gens = Vec::new();
                    for _ in 0..ngens {
                        let g = self.expression(&ctx)?;
                        gens.push(as_monomial(self.pos, &g)?);
                    }
                    c.rings.push(QuotientRing::new(&ctx, gens));
                }
                "hom" => {
                    check_id(n, tok.first(), 'H', c.homs.len())?;
                    if tok.len() != 3 {
                        return Err(bad(n, "hom needs: id source target"));
                    }
                    let s = ref_id(n, tok[1], 'R', c.rings.len())?;
                    let t = ref_id(n, tok[2], 'R', c.rings.len())?;
                    let (src, tgt) = (c.rings[s].clone(), c.rings[t].clone());
                    let images = (0..src.nvars())
                        .map(|_| self.expression(tgt.ctx()))
                        .collect::<Result<Vec<_>>>()?;
                    let h = RingHom::new(&src, &tgt, images).map_err(|e| bad(n, e.to_string()))?;
                    c.homs.push((s, t, h));
                }
                "square" => {
                    check_id(n, tok.first(), 'S', c.squares.len())?;
                    if tok.len() != 11 {
                        return Err(bad(n, "square needs: id apex 4 rings 5 homs"));
                    }
                    let apex = num(n, tok[1])?;
                    let mut rings = [0; 4];
                    for (k, r) in rings.iter_mut().enumerate() {
                        *r = ref_id(n, tok[2 + k], 'R', c.rings.len())?;
                    }
                    let mut homs = [0; 5];
                    for (k, h) in homs.iter_mut().enumerate() {
                        *h = ref_id(n, tok[6 + k], 'H', c.homs.len())?;
                    }
                    c.squares.push(SquareRecord { apex, rings, homs });
                }
                "node" => {
                    check_id(n, tok.first(), 'N', c.nodes.len())?;
                    if tok.len() < 3 {
                        return Err(bad(n, "node needs: id kind parent [label]"));
                    }
                    let kind = NodeKind::parse(tok[1]).ok_or_else(|| bad(n, format!("unknown node kind {}", tok[1])))?;
                    let parent = match tok[2] {
                        "-" => None,
                        p => Some(ref_id(n, p, 'N', c.nodes.len())?),
                    };
                    let label = rest.splitn(4, ' ').nth(3).unwrap_or("").to_string();
                    c.nodes.push(Node { kind, parent, label });
                }
                "matrix" => {
                    check_id(n, tok.first(), 'M', c.matrices.len())?;
                    if tok.len() != 5 {
                        return Err(bad(n, "matrix needs: id node ring rows cols"));
                    }
                    let node = ref_id(n, tok[1], 'N', c.nodes.len())?;
                    let ring = ref_id(n, tok[2], 'R', c.rings.len())?;
                    let (rows, cols) = (num(n, tok[3])?, num(n, tok[4])?);
                    let ctx = c.rings[ring].ctx().clone();
                    let entries = (0..rows * cols)
                        .map(|_| self.expression(&ctx))
                        .collect::<Result<Vec<_>>>()?;
                    let matrix = PolyMatrix::from_entries(&ctx, rows, cols, entries).map_err(|e| bad(n, e.to_string()))?;
                    c.matrices.push(MatrixRecord { node, ring, matrix });
                }
                "claim" => {
                    if tok.len() < 2 {
                        return Err(bad(n, "claim needs: node kind args"));
                    }
                    let node = ref_id(n, tok[0], 'N', c.nodes.len())?;
                    let claim = parse_claim(n, tok[1], &tok[2..], &c)?;
                    c.claims.push(ClaimRecord { node, claim });
                }
                "obligation" => {
                    if tok.len() < 5 {
                        return Err(bad(n, "obligation needs: node kind ring module vars [detail]"));
                    }
                    let node = ref_id(n, tok[0], 'N', c.nodes.len())?;
                    let kind = ObligationKind::parse(tok[1]).ok_or_else(|| bad(n, "unknown obligation kind"))?;
                    let ring = ref_id(n, tok[2], 'R', c.rings.len())?;
                    let module = ref_id(n, tok[3], 'M', c.matrices.len())?;
                    let vars = if tok[4] == "-" {
                        Vec::new()
                    } else {
                        tok[4].split(',').map(|v| num(n, v)).collect::<Result<Vec<_>>>()?
                    };
                    let detail = rest.splitn(6, ' ').nth(5).unwrap_or("").to_string();
                    c.obligations.push(ObligationRecord {
                        node,
                        kind,
                        ring,
                        module,
                        vars,
                        detail,
                    });
                }
                "profile" => {
                    if tok.len() != 4 {
                        return Err(bad(n, "profile needs four fields"));
                    }
                    let flag = |s: &str| s.parse::<bool>().map_err(|_| bad(n, format!("bad flag {s}")));
                    c.profile = Some(HypothesisProfile {
                        characteristic: tok[0].parse().map_err(|_| bad(n, "bad characteristic"))?,
                        rank: num(n, tok[1])?,
                        char_prime_to_rank_factorial: flag(tok[2])?,
                        rank_bound: flag(tok[3])?,
                    });
                }
                "output" => {
                    if tok.len() != 2 {
                        return Err(bad(n, "output needs: name matrix"));
                    }
                    c.outputs.push((tok[0].to_string(), ref_id(n, tok[1], 'M', c.matrices.len())?));
                }
                "end" => ended = true,
                other => return Err(bad(n, format!("unknown record {other}"))),
            }
        }
        if !ended {
            return Err(bad(self.pos, "missing end line"));
        }
        Ok(c)
    }
}

fn num(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| bad(line, format!("expected a number, got {s:?}")))
}

fn check_id(line: usize, tok: Option<&&str>, prefix: char, expected: usize) -> Result<()> {
    let want = format!("{prefix}{expected}");
    match tok {
        Some(t) if **t == want => Ok(()),
        Some(t) => Err(bad(line, format!("expected id {want}, got {t}"))),
        None => Err(bad(line, format!("missing id {want}"))),
    }
}

fn ref_id(line: usize, tok: &str, prefix: char, limit: usize) -> Result<usize> {
    let id = tok
        .strip_prefix(prefix)
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| bad(line, format!("expected a {prefix} reference, got {tok}")))?;
    if id >= limit {
        return Err(bad(line, format!("{tok} is not defined yet")));
    }
    Ok(id)
}

fn as_monomial(line: usize, p: &Polynomial) -> Result<Monomial> {
    match p.terms() {
        [(m, c)] if c.is_one() => Ok(m.clone()),
        _ => Err(bad(line, format!("ideal generator {p} is not a monomial"))),
    }
}

fn parse_claim(line: usize, kind: &str, args: &[&str], c: &Certificate) -> Result<Claim> {
    let want = |k: usize| -> Result<()> {
        if args.len() != k {
            return Err(bad(line, format!("{kind} claim takes {k} arguments")));
        }
        Ok(())
    };
    let r = |i: usize| ref_id(line, args[i], 'R', c.rings.len());
    let h = |i: usize| ref_id(line, args[i], 'H', c.homs.len());
    let s = |i: usize| ref_id(line, args[i], 'S', c.squares.len());
    let m = |i: usize| ref_id(line, args[i], 'M', c.matrices.len());
    Ok(match kind {
        "hom" => {
            want(1)?;
            Claim::Hom { hom: h(0)? }
        }
        "square" => {
            want(1)?;
            Claim::Square { square: s(0)? }
        }
        "idempotent" => {
            want(2)?;
            Claim::Idempotent { ring: r(0)?, e: m(1)? }
        }
        "rank" => {
            want(3)?;
            Claim::Rank { ring: r(0)?, e: m(1)?, rank: num(line, args[2])? }
        }
        "modiso" => {
            want(5)?;
            Claim::ModIso { ring: r(0)?, source: m(1)?, target: m(2)?, forward: m(3)?, backward: m(4)? }
        }
        "inverse" => {
            want(3)?;
            Claim::Inverse { ring: r(0)?, a: m(1)?, b: m(2)? }
        }
        "restrict" => {
            want(3)?;
            Claim::Restrict { hom: h(0)?, from: m(1)?, to: m(2)? }
        }
        "product" => {
            want(4)?;
            Claim::Product { ring: r(0)?, out: m(1)?, left: m(2)?, right: m(3)? }
        }
        "sum" => {
            want(4)?;
            Claim::Sum { ring: r(0)?, out: m(1)?, left: m(2)?, right: m(3)? }
        }
        "transpose" => {
            want(2)?;
            Claim::Transpose { out: m(0)?, of: m(1)? }
        }
        "augment" => {
            want(2)?;
            Claim::Augment { out: m(0)?, of: m(1)? }
        }
        "kernel" => {
            want(4)?;
            Claim::Kernel { ring: r(0)?, e: m(1)?, v: m(2)?, w: m(3)? }
        }
        "unimodular" => {
            want(3)?;
            Claim::Unimodular { ring: r(0)?, v: m(1)?, w: m(2)? }
        }
        "whitehead" => {
            want(5)?;
            Claim::Whitehead { hom: h(0)?, u: m(1)?, u_inv: m(2)?, sigma: m(3)?, sigma_inv: m(4)? }
        }
        "lift" => {
            want(4)?;
            Claim::Lift { hom: h(0)?, delta: m(1)?, delta_inv: m(2)?, sigma: m(3)? }
        }
        "glue" => {
            want(4)?;
            Claim::Glue { square: s(0)?, m: m(1)?, m1: m(2)?, m2: m(3)? }
        }
        "statement" => {
            want(2)?;
            Claim::Statement { stated: m(0)?, m: m(1)? }
        }
        other => return Err(bad(line, format!("unknown claim kind {other}"))),
    })
}

/// Assembles a certificate, interning rings, homs and matrices so that
/// identical inputs always produce identical text.
#[derive(Debug, Default)]
pub struct CertBuilder {
    cert: Certificate,
    matrix_index: HashMap<(usize, String), usize>,
}

impl CertBuilder {
    pub fn new(command: &str) -> CertBuilder {
        CertBuilder {
            cert: Certificate {
                command: command.to_string(),
                ..Certificate::default()
            },
            matrix_index: HashMap::new(),
        }
    }

    pub fn ring(&mut self, r: &QuotientRing) -> usize {
        if let Some(i) = self.cert.rings.iter().position(|x| x == r) {
            return i;
        }
        self.cert.rings.push(r.clone());
        self.cert.rings.len() - 1
    }

    pub fn hom(&mut self, h: &RingHom) -> usize {
        let s = self.ring(h.source());
        let t = self.ring(h.target());
        if let Some(i) = self
            .cert
            .homs
            .iter()
            .position(|(a, b, x)| *a == s && *b == t && x.images() == h.images())
        {
            return i;
        }
        self.cert.homs.push((s, t, h.clone()));
        self.cert.homs.len() - 1
    }

    pub fn square(&mut self, sq: &FiberSquare) -> usize {
        let rings = [self.ring(&sq.a), self.ring(&sq.a1), self.ring(&sq.a2), self.ring(&sq.a0)];
        let homs = [
            self.hom(&sq.i1),
            self.hom(&sq.i2),
            self.hom(&sq.j1),
            self.hom(&sq.j2),
            self.hom(&sq.section),
        ];
        let rec = SquareRecord { apex: sq.apex, rings, homs };
        if let Some(i) = self.cert.squares.iter().position(|x| *x == rec) {
            return i;
        }
        self.cert.squares.push(rec);
        self.cert.squares.len() - 1
    }

    pub fn node(&mut self, kind: NodeKind, parent: Option<usize>, label: impl Into<String>) -> usize {
        let label: String = label.into();
        self.cert.nodes.push(Node {
            kind,
            parent,
            label: label.replace('\n', " "),
        });
        self.cert.nodes.len() - 1
    }

    pub fn matrix(&mut self, node: usize, ring: &QuotientRing, m: &PolyMatrix) -> usize {
        let r = self.ring(ring);
        let key = (r, format!("{}x{} {}", m.rows(), m.cols(), m));
        if let Some(&i) = self.matrix_index.get(&key) {
            return i;
        }
        self.cert.matrices.push(MatrixRecord {
            node,
            ring: r,
            matrix: m.clone(),
        });
        let id = self.cert.matrices.len() - 1;
        self.matrix_index.insert(key, id);
        id
    }

    /// Interns `m` and binds it to a separate, never shared copy, so that a
    /// certificate cannot be rewritten into one about a different input.
    pub fn statement(&mut self, node: usize, ring: &QuotientRing, m: &PolyMatrix) -> usize {
        let id = self.matrix(node, ring, m);
        let r = self.ring(ring);
        self.cert.matrices.push(MatrixRecord {
            node,
            ring: r,
            matrix: m.clone(),
        });
        let stated = self.cert.matrices.len() - 1;
        self.claim(node, Claim::Statement { stated, m: id });
        id
    }

    pub fn claim(&mut self, node: usize, claim: Claim) {
        let rec = ClaimRecord { node, claim };
        if !self.cert.claims.contains(&rec) {
            self.cert.claims.push(rec);
        }
    }

    pub fn obligation(&mut self, rec: ObligationRecord) {
        self.cert.obligations.push(rec);
    }

    pub fn profile(&mut self, p: HypothesisProfile) {
        self.cert.profile = Some(p);
    }

    pub fn output(&mut self, name: &str, matrix: usize) {
        self.cert.outputs.push((name.to_string(), matrix));
    }

    pub fn certificate(&self) -> &Certificate {
        &self.cert
    }

    pub fn finish(self) -> Certificate {
        self.cert
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::build_vorst_square;
    use crate::simplicial::SimplicialComplex;

    #[test]
    fn text_roundtrip() {
        let sq = build_vorst_square(Field::Rational, &SimplicialComplex::new(2, &[vec![0], vec![1]]).unwrap()).unwrap();
        let mut b = CertBuilder::new("test");
        let n0 = b.node(NodeKind::Decompose, None, "root with a label");
        let n1 = b.node(NodeKind::Base, Some(n0), "");
        let s = b.square(&sq);
        b.claim(n0, Claim::Square { square: s });
        let e = PolyMatrix::from_entries(sq.a.ctx(), 1, 2, vec![
            Polynomial::parse("-3/2*x0^2 + x1", sq.a.ctx()).unwrap(),
            Polynomial::parse("0", sq.a.ctx()).unwrap(),
        ])
        .unwrap();
        let m = b.matrix(n1, &sq.a, &e);
        assert_eq!(b.matrix(n1, &sq.a, &e), m);
        let r = b.ring(&sq.a);
        b.claim(n1, Claim::Idempotent { ring: r, e: m });
        b.obligation(ObligationRecord {
            node: n1,
            kind: ObligationKind::StableExtend,
            ring: r,
            module: m,
            vars: vec![0, 1],
            detail: "needs an oracle".into(),
        });
        b.profile(HypothesisProfile::new(Field::Rational, 2));
        b.output("e", m);
        let cert = b.finish();
        let text = cert.to_text();
        let back = Certificate::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.nodes[0].label, "root with a label");
        assert_eq!(back.obligations[0].detail, "needs an oracle");
        assert_eq!(back.output("e"), Some(&e));
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(Certificate::parse("").is_err());
        assert!(Certificate::parse("srpb/1\n").is_err());
        assert!(Certificate::parse("srpb/1\nclaim N0 hom H0\nend\n").is_err());
        assert!(Certificate::parse("srpb/1\nring R0 Q 2 1 grevlex 0,1\nx0 + x1\nend\n").is_err());
        assert!(Certificate::parse("srpb/1\nend\n").unwrap().claims.is_empty());
    }
}
