//! Command-line front end and independent certificate verifier.
//!
//! Inputs are given inline: complexes as `--vertices 3 --facets "0,1;1,2"`,
//! monomial ideals as `--ideal "x0*x1, x1*x2"`, matrices as rows separated
//! by `;` with entries separated by `,`. Certificates are written in the
//! `srpb/1` text format.

pub mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use srpb::cert::Certificate;
use srpb::engines::{
    extend_witness, gl_lift_certificate, patch_certificate, square_certificate, umrow_lift, ConjugatorOracle,
    ExtendOracle, FailingOracle,
};
use srpb::groebner::member;
use srpb::polycore::{Ctx, Field, Monomial, PolyContext, PolyMatrix, Polynomial};
use srpb::projmod::{milnor_patch, ProjModule, UmRow};
use srpb::quotient::{build_vorst_square, det_unit_inverse, fiber_check, lift_gl, GlStrategy, QuotientRing, RingHom};
use srpb::simplicial::{vertices_of, SimplicialComplex, VertexSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Core(#[from] srpb::Error),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use srpb::Error as E;
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Core(e) => match e {
                E::AllStrategiesFailed { .. } | E::LifterContract(_) => EXIT_EXHAUSTED,
                E::Internal(_) => EXIT_VERIFY,
                _ => EXIT_INPUT,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "srpb", version, about = "Stanley-Reisner rings, patching and lifting with certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Faces, non-faces and the link/deletion/cone decomposition.
    Complex {
        #[command(subcommand)]
        op: ComplexOp,
    },
    /// Normal forms in a monomial quotient ring.
    Ring {
        #[command(subcommand)]
        op: RingOp,
    },
    /// Ideal membership with cofactor certificates.
    Gb {
        #[command(subcommand)]
        op: GbOp,
    },
    /// The fiber square of a Vorst decomposition.
    Square {
        #[command(subcommand)]
        op: SquareOp,
    },
    /// Milnor patching of I_r ⊕ 0 along σ over A0.
    Patch(PatchArgs),
    /// Proves a projective module extended from the field.
    Extend(ExtendArgs),
    /// Lifts a unimodular row over R/J to R.
    Umrow {
        #[command(subcommand)]
        op: UmrowOp,
    },
    /// Lifts an invertible matrix over R/J to R.
    Gl {
        #[command(subcommand)]
        op: GlOp,
    },
    /// Re-checks every identity in a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ComplexArgs {
    /// Size of the ambient vertex set.
    #[arg(long)]
    pub vertices: usize,
    /// Facets as `0,1;1,2`; empty for the complex {∅}.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub facets: String,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArg {
    /// `Q` or `F<p>` for a prime p.
    #[arg(long, default_value = "Q")]
    pub field: String,
}

#[derive(Debug, Clone, Args)]
pub struct RingArgs {
    #[arg(long)]
    pub vars: usize,
    /// Monomial generators, comma separated.
    #[arg(long, default_value = "")]
    pub ideal: String,
    #[command(flatten)]
    pub field: FieldArg,
}

#[derive(Debug, Clone, Args)]
pub struct CertOut {
    /// Write the certificate here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ComplexOp {
    Faces(ComplexArgs),
    Nonfaces(ComplexArgs),
    Link(VertexArgs),
    Delete(VertexArgs),
    Cone(VertexArgs),
    Decompose(ComplexArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VertexArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    #[arg(long)]
    pub vertex: usize,
}

#[derive(Debug, Subcommand)]
pub enum RingOp {
    Nf {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum GbOp {
    Member {
        #[arg(long)]
        vars: usize,
        /// Generators separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[command(flatten)]
        field: FieldArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum SquareOp {
    Build {
        #[command(flatten)]
        complex: ComplexArgs,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        out: CertOut,
    },
    Check {
        #[command(flatten)]
        complex: ComplexArgs,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
}

#[derive(Debug, Args)]
pub struct PatchArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    #[command(flatten)]
    pub field: FieldArg,
    /// σ ∈ GL_r(A0).
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: String,
    /// σ⁻¹; computed from the adjugate when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_inv: Option<String>,
    #[command(flatten)]
    pub out: CertOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    Builtin,
    Stub,
    Conjugator,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    #[command(flatten)]
    pub field: FieldArg,
    /// The idempotent E.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
    #[arg(long, value_enum, default_value = "builtin")]
    pub oracle: OracleChoice,
    /// Conjugator g with E = g·D·g⁻¹ for `--oracle conjugator`.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g_inv: Option<String>,
    #[command(flatten)]
    pub out: CertOut,
}

#[derive(Debug, Subcommand)]
pub enum UmrowOp {
    Lift {
        #[command(flatten)]
        ring: RingArgs,
        /// The row v over R/J.
        #[arg(long, allow_hyphen_values = true)]
        row: String,
        /// Comma separated subset of entrywise, elementary, section, face-descent.
        #[arg(long)]
        strategies: Option<String>,
        /// Monomial generators of I ⊆ J to reduce the lift by.
        #[arg(long)]
        reduce: Option<String>,
        #[arg(long, value_enum, default_value = "builtin")]
        oracle: OracleChoice,
        #[command(flatten)]
        out: CertOut,
    },
}

#[derive(Debug, Subcommand)]
pub enum GlOp {
    Lift {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        sigma_inv: Option<String>,
        #[arg(long)]
        strategies: Option<String>,
        #[command(flatten)]
        out: CertOut,
    },
}

/// What a command printed and the exit code it asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, code: EXIT_OK }
    }
}

pub fn parse_field(text: &str) -> Result<Field> {
    Field::parse(text).map_err(|e| CliError::Input(e.to_string()))
}

pub fn parse_complex(args: &ComplexArgs) -> Result<SimplicialComplex> {
    let facets = args
        .facets
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|f| {
            f.split(',')
                .map(|v| v.trim().parse::<usize>().map_err(|_| CliError::Input(format!("bad vertex '{v}' in '{f}'"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplicialComplex::new(args.vertices, &facets)?)
}

pub fn parse_poly(text: &str, ctx: &Ctx) -> Result<Polynomial> {
    Polynomial::parse(text, ctx).map_err(|e| CliError::Input(format!("{text:?}: {e}")))
}

pub fn parse_monomials(text: &str, ctx: &Ctx) -> Result<Vec<Monomial>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let p = parse_poly(s, ctx)?;
            match p.terms() {
                [(m, c)] if c.is_one() => Ok(m.clone()),
                _ => Err(CliError::Input(format!("'{s}' is not a monic monomial"))),
            }
        })
        .collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_matrix(text: &str, ctx: &Ctx) -> Result<PolyMatrix> {
    let rows: Vec<Vec<Polynomial>> = text
        .split(';')
        .map(|row| row.split(',').map(|e| parse_poly(e, ctx)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input("matrix rows have different lengths".into()));
    }
    Ok(PolyMatrix::from_entries(ctx, rows.len(), cols, rows.into_iter().flatten().collect())?)
}

pub fn format_matrix(m: &PolyMatrix) -> String {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("; ")
}

fn ring_of(args: &RingArgs) -> Result<QuotientRing> {
    let ctx = PolyContext::new(args.vars, parse_field(&args.field.field)?);
    let gens = parse_monomials(&args.ideal, &ctx)?;
    Ok(QuotientRing::new(&ctx, gens))
}

fn strategies(text: &Option<String>) -> Result<Vec<GlStrategy>> {
    match text {
        Some(t) => GlStrategy::parse_list(t).map_err(|e| CliError::Input(e.to_string())),
        None => Ok(GlStrategy::ALL.to_vec()),
    }
}

fn set_text(s: VertexSet) -> String {
    let v = vertices_of(s);
    if v.is_empty() {
        "{}".into()
    } else {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn facets_text(c: &SimplicialComplex) -> String {
    c.facets().iter().map(|&f| set_text(f)).collect::<Vec<_>>().join(" | ")
}

fn emit_cert(out: &CertOut, cert: &Certificate, text: &mut String) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, cert.to_text()).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            text.push_str(&cert.to_text());
            Ok(())
        }
    }
}

fn inverse_of(given: &Option<String>, m: &PolyMatrix, ring: &QuotientRing) -> Result<PolyMatrix> {
    match given {
        Some(t) => Ok(ring.mat_nf(&parse_matrix(t, ring.ctx())?)),
        None => Ok(det_unit_inverse(m, ring)?),
    }
}

fn oracle_for(choice: OracleChoice, args: &ExtendArgs, ctx: &Ctx) -> Result<Option<Box<dyn ExtendOracle>>> {
    Ok(match choice {
        OracleChoice::Builtin => None,
        OracleChoice::Stub => Some(Box::new(FailingOracle)),
        OracleChoice::Conjugator => {
            let (Some(g), Some(gi)) = (&args.g, &args.g_inv) else {
                return Err(CliError::Input("--oracle conjugator needs --g and --g-inv".into()));
            };
            Some(Box::new(ConjugatorOracle {
                g: parse_matrix(g, ctx)?,
                g_inv: parse_matrix(gi, ctx)?,
            }))
        }
    })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut s = String::new();
    match &cli.command {
        Command::Complex { op } => {
            let (c, v) = match op {
                ComplexOp::Link(a) | ComplexOp::Delete(a) | ComplexOp::Cone(a) => (parse_complex(&a.complex)?, Some(a.vertex)),
                ComplexOp::Faces(a) | ComplexOp::Nonfaces(a) | ComplexOp::Decompose(a) => (parse_complex(a)?, None),
            };
            match op {
                ComplexOp::Faces(_) => c.faces().into_iter().for_each(|f| writeln!(s, "{}", set_text(f)).unwrap()),
                ComplexOp::Nonfaces(_) => c.minimal_nonfaces().into_iter().for_each(|f| writeln!(s, "{}", set_text(f)).unwrap()),
                ComplexOp::Link(_) => writeln!(s, "{}", facets_text(&c.link(v.unwrap())?)).unwrap(),
                ComplexOp::Delete(_) => writeln!(s, "{}", facets_text(&c.deletion(v.unwrap())?)).unwrap(),
                ComplexOp::Cone(_) => writeln!(s, "{}", facets_text(&c.cone(v.unwrap())?)).unwrap(),
                ComplexOp::Decompose(_) => {
                    let d = c.vorst_decompose()?;
                    writeln!(s, "apex {}", d.apex).unwrap();
                    writeln!(s, "deletion {}", facets_text(&d.sigma1)).unwrap();
                    writeln!(s, "link {}", facets_text(&d.sigma2)).unwrap();
                }
            }
        }
        Command::Ring { op: RingOp::Nf { ring, poly } } => {
            let a = ring_of(ring)?;
            writeln!(s, "{}", a.normal_form(&parse_poly(poly, a.ctx())?)).unwrap();
        }
        Command::Gb { op: GbOp::Member { vars, gens, poly, field } } => {
            let ctx = PolyContext::new(*vars, parse_field(&field.field)?);
            let gens = gens.split(';').map(|g| parse_poly(g, &ctx)).collect::<Result<Vec<_>>>()?;
            let f = parse_poly(poly, &ctx)?;
            match member(&f, &gens)? {
                Some(cert) => {
                    writeln!(s, "member").unwrap();
                    for (g, c) in gens.iter().zip(&cert.coefficients) {
                        writeln!(s, "({c}) * ({g})").unwrap();
                    }
                }
                None => writeln!(s, "not a member").unwrap(),
            }
        }
        Command::Square { op } => match op {
            SquareOp::Build { complex, field, out } => {
                let sq = build_vorst_square(parse_field(&field.field)?, &parse_complex(complex)?)?;
                for (name, r) in [("A", &sq.a), ("A1", &sq.a1), ("A2", &sq.a2), ("A0", &sq.a0)] {
                    writeln!(s, "{name} {r}").unwrap();
                }
                writeln!(s, "apex {}", sq.apex).unwrap();
                emit_cert(out, &square_certificate(&sq), &mut s)?;
            }
            SquareOp::Check { complex, field, degree } => {
                let sq = build_vorst_square(parse_field(&field.field)?, &parse_complex(complex)?)?;
                let r = fiber_check(&sq, *degree);
                writeln!(s, "degree {} counts A={} A1={} A2={} A0={}", r.degree, r.count_a, r.count_a1, r.count_a2, r.count_a0)
                    .unwrap();
                if !r.ok() {
                    return Err(CliError::Verification(format!("fiber check fails at {:?}", r.first_failure)));
                }
                writeln!(s, "ok").unwrap();
            }
        },
        Command::Patch(a) => {
            let sq = build_vorst_square(parse_field(&a.field.field)?, &parse_complex(&a.complex)?)?;
            let sigma = sq.a0.mat_nf(&parse_matrix(&a.sigma, sq.a0.ctx())?);
            if !sigma.is_square() {
                return Err(CliError::Input("σ must be square".into()));
            }
            let sigma_inv = inverse_of(&a.sigma_inv, &sigma, &sq.a0)?;
            let p = milnor_patch(&sq, sigma.rows(), &sigma, &sigma_inv)?;
            writeln!(s, "E {}", format_matrix(p.module.matrix())).unwrap();
            emit_cert(&a.out, &patch_certificate(&sq, &p, &sigma, &sigma_inv)?, &mut s)?;
        }
        Command::Extend(a) => {
            let c = parse_complex(&a.complex)?;
            let ring = QuotientRing::from_complex(parse_field(&a.field.field)?, &c);
            let e = parse_matrix(&a.matrix, ring.ctx())?;
            let p = ProjModule::new(&ring, ring.mat_nf(&e))?;
            let oracle = oracle_for(a.oracle, a, ring.ctx())?;
            let out = extend_witness(&p, oracle.as_deref())?;
            for o in &out.obligations {
                writeln!(s, "obligation {} vars {:?}: {}", o.kind.name(), o.vars, o.detail).unwrap();
            }
            emit_cert(&a.out, &out.certificate, &mut s)?;
            if out.iso.is_none() {
                return Ok(Outcome { stdout: s, code: EXIT_EXHAUSTED });
            }
        }
        Command::Umrow { op: UmrowOp::Lift { ring, row, strategies: st, reduce, oracle, out } } => {
            let j = ring_of(ring)?;
            let v = UmRow::certify(&j, parse_matrix(row, j.ctx())?)?;
            let reduce = match reduce {
                Some(t) => Some(QuotientRing::new(j.ctx(), parse_monomials(t, j.ctx())?)),
                None => None,
            };
            let stub = FailingOracle;
            let oracle: Option<&dyn ExtendOracle> = match oracle {
                OracleChoice::Builtin => None,
                OracleChoice::Stub => Some(&stub),
                OracleChoice::Conjugator => return Err(CliError::Input("umrow lift takes builtin or stub".into())),
            };
            let res = umrow_lift(&v, oracle, &strategies(st)?, reduce.as_ref())?;
            for d in &res.diagnostics {
                writeln!(s, "diagnostic {d}").unwrap();
            }
            for o in &res.obligations {
                writeln!(s, "obligation {} vars {:?}: {}", o.kind.name(), o.vars, o.detail).unwrap();
            }
            if let Some(l) = &res.lift {
                writeln!(s, "u {}", format_matrix(&l.u)).unwrap();
                writeln!(s, "w {}", format_matrix(&l.w)).unwrap();
            }
            emit_cert(out, &res.certificate, &mut s)?;
            if res.lift.is_none() {
                return Ok(Outcome { stdout: s, code: EXIT_EXHAUSTED });
            }
        }
        Command::Gl { op: GlOp::Lift { ring, sigma, sigma_inv, strategies: st, out } } => {
            let j = ring_of(ring)?;
            let r = QuotientRing::polynomial_ring(j.ctx());
            let pi = RingHom::quotient_map(&r, &j)?;
            let sig = j.mat_nf(&parse_matrix(sigma, j.ctx())?);
            let sig_inv = inverse_of(sigma_inv, &sig, &j)?;
            match lift_gl(&sig, &sig_inv, &pi, &strategies(st)?, None) {
                Ok(l) => {
                    writeln!(s, "strategy {}", l.strategy).unwrap();
                    writeln!(s, "delta {}", format_matrix(&l.delta)).unwrap();
                    emit_cert(out, &gl_lift_certificate(&sig, &sig_inv, &pi, &l), &mut s)?;
                }
                Err(srpb::Error::AllStrategiesFailed { diagnostics }) => {
                    for d in diagnostics {
                        writeln!(s, "diagnostic {d}").unwrap();
                    }
                    return Ok(Outcome { stdout: s, code: EXIT_EXHAUSTED });
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify { cert } => {
            let text = std::fs::read_to_string(cert).map_err(|source| CliError::Io {
                path: cert.clone(),
                source,
            })?;
            let c = Certificate::parse(&text)?;
            let report = verify::verify(&c);
            writeln!(s, "{report}").unwrap();
            if !report.passed() {
                return Ok(Outcome { stdout: s, code: EXIT_VERIFY });
            }
        }
    }
    Ok(Outcome::ok(s))
}
