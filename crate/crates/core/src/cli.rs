//! Command-line front end. Every subcommand prints one report (JSON by default) and maps the
//! outcome to an exit code: 0 success, 1 check failure, 2 usage or input error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::families::{family_series, make_family, BSource, FamilyKind, FamilySpec};
use crate::functors::{self, functor_f, functor_g_atr, functor_g_str, Direction};
use crate::graded_algebra::{
    self, build_bc, check_associativity, check_pgc, commutativity_witness, format_element, hilbert_series, multiply, saturation_condition_check,
    torsion_elements, AlgElement, AlgebraFile, BcType, DenseAlgebra, GradedAlgebra, NormalWordAlgebra, PresentationFile, Side,
};
use crate::operad::{check_axioms, classify_triviality, is_central, prime_at_horizon, Operad, OperadFile, PrimeVerdict, DEFAULT_PRIME_DIM_CAP};
use crate::scalars::{Field, FieldDescriptor};
use crate::series::{classify_growth, gk_estimate, multiplicity, HilbertSeries, TailWindow};
use crate::worked_examples::{
    field_tower_series, multiplicity_example, nested_repeat_algebra, nested_repeat_pipeline, squarefree_pipeline, FieldTowerConfig,
    NestedRepeatConfig, ScheduleMode,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "operadkit", version, about = "Exact computations with locally finite symmetric operads and graded algebras")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Q, F<p>, F<q> / GF(q) for q = p^(2^k), or a JSON field descriptor
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// materialized arity (operads) or degree (algebras)
    #[arg(long, global = true, default_value_t = 10)]
    pub horizon: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// recorded in every report; all computations are deterministic
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// cap on worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BPreset {
    Trivial,
    Truncated,
    SquareZero,
    Exterior,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgebraPreset {
    /// k[t], deg t = w
    Polynomial,
    /// k ⊕ kx, x² = 0, deg x = w
    DualNumbers,
    /// k[x] plus square-zero modules a_r k[x]
    SquareZero,
    /// B{c} from a cyclic preset
    Bc,
    /// binary squarefree word algebra
    Squarefree,
    /// nested-repeat word algebra on generators of the given degrees
    NestedRepeat,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TypeArg {
    Even,
    Odd,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BArgs {
    /// cyclic algebra B for lin-e / lin-o / bc (default square-zero with b = 1)
    #[arg(long, value_enum)]
    pub b_preset: Option<BPreset>,
    #[arg(long)]
    pub b: Option<usize>,
}

impl BArgs {
    fn source(&self) -> Option<BSource> {
        let b = self.b.unwrap_or(1);
        self.b_preset.map(|p| match p {
            BPreset::Trivial => BSource::Trivial,
            BPreset::Truncated => BSource::Truncated { b },
            BPreset::SquareZero => BSource::SquareZero { b },
            BPreset::Exterior => BSource::ExteriorType,
        })
        .or(self.b.map(|b| BSource::SquareZero { b }))
    }
}

/// Where an operad comes from: a named family or an operad JSON dump.
#[derive(Args, Debug, Clone, Default)]
pub struct OperadSource {
    /// com, ope, mas, com-w, ope-w, lin-e, lin-o
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub w: Option<usize>,
    #[command(flatten)]
    pub b: BArgs,
    /// operad.json (or algebra.json where an algebra is accepted)
    #[arg(long)]
    pub input: Option<PathBuf>,
}

/// Where an algebra comes from: a preset or an algebra / presentation JSON file.
#[derive(Args, Debug, Clone, Default)]
pub struct AlgebraSource {
    #[arg(long, value_enum)]
    pub algebra: Option<AlgebraPreset>,
    /// generator degree for polynomial / dual-numbers / square-zero
    #[arg(long = "gen-degree")]
    pub gen_degree: Option<usize>,
    /// module degrees for square-zero, comma separated
    #[arg(long, value_delimiter = ',')]
    pub modules: Vec<usize>,
    /// generator degrees for nested-repeat, comma separated
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<usize>,
    /// even / odd: type labels (bc, or attached to polynomial presets)
    #[arg(long = "type", value_enum)]
    pub ty: Option<TypeArg>,
    /// cyclic algebra B for the bc preset (default square-zero with b = 1)
    #[arg(long, value_enum)]
    pub bc_preset: Option<BPreset>,
    #[arg(long)]
    pub bc_b: Option<usize>,
    /// algebra.json or presentation.json
    #[arg(long)]
    pub algebra_input: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FunctorArg {
    F,
    GStr,
    GAtr,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlphaChoice {
    /// x, x², x³, … for the first positive-degree basis element
    Powers,
    /// c, c², … in B{c}
    CPowers,
    /// the generators x_1, x_2, … of a word algebra, in order
    Generators,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    /// subalgebra of a field tower with logarithmic partial sums
    FieldTower,
    /// nested-repeat word algebra with its degree schedule
    NestedRepeat,
    /// binary squarefree word algebra
    Squarefree,
    /// multiplicity of a direct sum
    Multiplicity,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exponential,
    Custom,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a named family and dump it (JSON) or its Hilbert series (CSV)
    Family {
        kind: String,
        #[arg(long)]
        w: Option<usize>,
        #[command(flatten)]
        b: BArgs,
    },
    /// Build a preset graded algebra and dump it
    Algebra {
        #[command(flatten)]
        source: AlgebraSource,
    },
    /// Apply F, G_Str or G_Atr and report the round trip
    Functor {
        which: FunctorArg,
        #[command(flatten)]
        operad: OperadSource,
        #[command(flatten)]
        algebra: AlgebraSource,
    },
    /// Check the operad axioms up to the horizon
    Axioms {
        #[command(flatten)]
        operad: OperadSource,
    },
    /// Hilbert series of an operad or algebra
    Hilbert {
        #[command(flatten)]
        operad: OperadSource,
        #[command(flatten)]
        algebra: AlgebraSource,
    },
    /// GK-dimension estimate and growth class
    Gkdim {
        #[command(flatten)]
        operad: OperadSource,
        #[command(flatten)]
        algebra: AlgebraSource,
    },
    /// Multiplicity (limsup of dimensions) read off the tail
    Multiplicity {
        #[command(flatten)]
        operad: OperadSource,
        #[command(flatten)]
        algebra: AlgebraSource,
    },
    /// Left / right torsion of an algebra
    Torsion {
        #[command(flatten)]
        algebra: AlgebraSource,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
    },
    /// Saturation condition for a sequence of central elements
    Saturation {
        #[command(flatten)]
        algebra: AlgebraSource,
        /// degree bound d (default horizon / 2)
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum)]
        alphas: Option<AlphaChoice>,
    },
    /// Search for annihilating ideal pairs up to the horizon
    Prime {
        #[command(flatten)]
        operad: OperadSource,
    },
    /// Centrality of a basis element (or of every basis element)
    Central {
        #[command(flatten)]
        operad: OperadSource,
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Action type per arity and growth class
    Classify {
        #[command(flatten)]
        operad: OperadSource,
    },
    /// Run one of the worked examples end to end
    Example {
        name: ExampleName,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// custom degree schedule, comma separated
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        /// number of schedule stages for exponential mode
        #[arg(long)]
        stages: Option<usize>,
        /// tower levels for the field-tower example
        #[arg(long)]
        levels: Option<usize>,
    },
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<Outcome, UsageError>;

/// A finished report: JSON body, optional CSV rendering, pass/fail.
struct Outcome {
    report: Value,
    csv: Option<String>,
    passed: bool,
}

impl Outcome {
    fn ok(report: impl Serialize) -> Outcome {
        Outcome { report: to_value(report), csv: None, passed: true }
    }

    fn checked(report: impl Serialize, passed: bool) -> Outcome {
        Outcome { report: to_value(report), csv: None, passed }
    }

    fn with_csv(mut self, csv: String) -> Outcome {
        self.csv = Some(csv);
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn field_of(common: &CommonArgs) -> Result<Field, UsageError> {
    Ok(Field::new(&FieldDescriptor::parse(&common.field)?)?)
}

fn read_json(path: &PathBuf) -> Result<Value, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError(format!("malformed JSON in {}: {e}", path.display())))
}

enum LoadedAlgebra {
    Dense(DenseAlgebra),
    Words(NormalWordAlgebra),
}

impl LoadedAlgebra {
    fn get(&self) -> &dyn GradedAlgebra {
        match self {
            LoadedAlgebra::Dense(a) => a,
            LoadedAlgebra::Words(a) => a,
        }
    }

    fn dump(&self) -> Value {
        match self {
            LoadedAlgebra::Dense(a) => to_value(a.to_file()),
            LoadedAlgebra::Words(a) => to_value(a.to_file()),
        }
    }

    fn default_alphas(&self, preset: Option<AlgebraPreset>) -> AlphaChoice {
        match (self, preset) {
            (LoadedAlgebra::Words(_), _) => AlphaChoice::Generators,
            (_, Some(AlgebraPreset::Bc)) => AlphaChoice::CPowers,
            _ => AlphaChoice::Powers,
        }
    }
}

fn algebra_from_value(v: Value) -> Result<LoadedAlgebra, UsageError> {
    if v.get("products").is_some() {
        let file: AlgebraFile = serde_json::from_value(v)?;
        Ok(LoadedAlgebra::Dense(DenseAlgebra::from_file(&file)?))
    } else if v.get("generators").is_some() {
        let file: PresentationFile = serde_json::from_value(v)?;
        Ok(LoadedAlgebra::Words(NormalWordAlgebra::from_file(&file)?))
    } else {
        Err(UsageError("input is neither an algebra dump nor a presentation".into()))
    }
}

fn is_algebra_file(v: &Value) -> bool {
    v.get("products").is_some() || v.get("generators").is_some()
}

fn b_source(preset: Option<BPreset>, b: Option<usize>) -> BSource {
    BArgs { b_preset: preset, b }.source().unwrap_or(BSource::SquareZero { b: 1 })
}

fn build_algebra(src: &AlgebraSource, common: &CommonArgs) -> Result<Option<LoadedAlgebra>, UsageError> {
    if let Some(path) = &src.algebra_input {
        return algebra_from_value(read_json(path)?).map(Some);
    }
    let Some(preset) = src.algebra else { return Ok(None) };
    let field = field_of(common)?;
    let h = common.horizon;
    let w = src.gen_degree.unwrap_or(1);
    if w == 0 {
        return Err(UsageError("--gen-degree must be positive".into()));
    }
    let typed = |a: DenseAlgebra| match src.ty {
        Some(TypeArg::Even) => a.with_uniform_parity(graded_algebra::Parity::Even),
        Some(TypeArg::Odd) => a.with_uniform_parity(graded_algebra::Parity::Odd),
        None => a,
    };
    let a = match preset {
        AlgebraPreset::Polynomial => LoadedAlgebra::Dense(typed(DenseAlgebra::polynomial(&field, w, h))),
        AlgebraPreset::DualNumbers => LoadedAlgebra::Dense(typed(DenseAlgebra::dual_numbers(&field, w, h))),
        AlgebraPreset::SquareZero => {
            let modules = if src.modules.is_empty() { vec![1] } else { src.modules.clone() };
            if modules.contains(&0) {
                return Err(UsageError("module degrees must be positive".into()));
            }
            LoadedAlgebra::Dense(typed(DenseAlgebra::square_zero_extension(&field, w, &modules, h)))
        }
        AlgebraPreset::Bc => {
            let ty = if src.ty == Some(TypeArg::Odd) { BcType::Odd } else { BcType::Even };
            let b = b_source(src.bc_preset, src.bc_b).build(&field);
            LoadedAlgebra::Dense(build_bc(&b, ty, h)?)
        }
        AlgebraPreset::Squarefree => LoadedAlgebra::Words(NormalWordAlgebra::binary_squarefree(&field, h)),
        AlgebraPreset::NestedRepeat => {
            let degrees = if src.degrees.is_empty() { vec![1, 5, 40] } else { src.degrees.clone() };
            LoadedAlgebra::Words(nested_repeat_algebra(&field, &degrees, h)?)
        }
    };
    Ok(Some(a))
}

fn build_operad(src: &OperadSource, common: &CommonArgs) -> Result<Option<Operad>, UsageError> {
    if let Some(path) = &src.input {
        let v = read_json(path)?;
        if is_algebra_file(&v) {
            return Ok(None);
        }
        let file: OperadFile = serde_json::from_value(v)?;
        return Ok(Some(Operad::from_file(&file)?));
    }
    let Some(kind) = &src.family else { return Ok(None) };
    let field = field_of(common)?;
    let kind = FamilyKind::parse(kind, src.w, src.b.source())?;
    Ok(Some(make_family(&FamilySpec::new(kind, &field, common.horizon))?))
}

fn require_operad(src: &OperadSource, common: &CommonArgs) -> Result<Operad, UsageError> {
    build_operad(src, common)?.ok_or_else(|| UsageError("needs --family <kind> or --input <operad.json>".into()))
}

fn require_algebra(src: &AlgebraSource, common: &CommonArgs) -> Result<LoadedAlgebra, UsageError> {
    build_algebra(src, common)?.ok_or_else(|| UsageError("needs --algebra <preset> or --algebra-input <file>".into()))
}

/// `--input` may also name an algebra file for the series commands.
fn algebra_via_input(op: &OperadSource, alg: &AlgebraSource, common: &CommonArgs) -> Result<Option<LoadedAlgebra>, UsageError> {
    if let Some(a) = build_algebra(alg, common)? {
        return Ok(Some(a));
    }
    if let Some(path) = &op.input {
        let v = read_json(path)?;
        if is_algebra_file(&v) {
            return algebra_from_value(v).map(Some);
        }
    }
    Ok(None)
}

/// (series, index column name, how it was obtained)
fn series_of(op: &OperadSource, alg: &AlgebraSource, common: &CommonArgs, closed_form_ok: bool) -> Result<(HilbertSeries, &'static str, &'static str), UsageError> {
    if let Some(a) = algebra_via_input(op, alg, common)? {
        return Ok((hilbert_series(a.get()), "degree", "computed"));
    }
    if closed_form_ok {
        if let (Some(kind), None) = (&op.family, &op.input) {
            // dimensions of the families are known in closed form; no need to build the operad
            let kind = FamilyKind::parse(kind, op.w, op.b.source())?;
            field_of(common)?;
            return Ok((family_series(&kind, common.horizon), "arity", "closed_form"));
        }
    }
    let p = require_operad(op, common)?;
    Ok((p.hilbert_series(), "arity", "computed"))
}

fn cmd_family(kind: &str, w: Option<usize>, b: &BArgs, common: &CommonArgs) -> CmdResult {
    let src = OperadSource { family: Some(kind.to_string()), w, b: b.clone(), input: None };
    let p = require_operad(&src, common)?;
    let h = p.hilbert_series();
    let csv = h.to_csv("arity");
    Ok(Outcome::ok(json!({ "operad": p.to_file(), "series": h.to_file() })).with_csv(csv))
}

fn cmd_algebra(src: &AlgebraSource, common: &CommonArgs) -> CmdResult {
    let a = require_algebra(src, common)?;
    let alg = a.get();
    let h = hilbert_series(alg);
    let assoc = check_associativity(alg, alg.horizon());
    let commutative = commutativity_witness(alg, alg.horizon(), false).is_none();
    let pgc = check_pgc(alg, alg.horizon()).ok().map(|r| r.passed());
    let csv = h.to_csv("degree");
    let report = json!({
        "algebra": a.dump(),
        "series": h.to_file(),
        "associative": assoc.is_empty(),
        "commutative": commutative,
        "pgc": pgc,
    });
    Ok(Outcome::checked(report, assoc.is_empty()).with_csv(csv))
}

fn cmd_functor(which: FunctorArg, op: &OperadSource, alg: &AlgebraSource, common: &CommonArgs) -> CmdResult {
    match which {
        FunctorArg::F => {
            let p = require_operad(op, common)?;
            let a = functor_f(&p);
            let s_trivial = (1..=p.horizon()).all(|n| {
                matches!(classify_triviality(&p, n), crate::operad::Triviality::STrivial | crate::operad::Triviality::Zero)
            });
            let direction = if s_trivial { Direction::Str } else { Direction::Atr };
            let back = functors::operad_roundtrip(&p, direction);
            let shift = functors::hilbert_shift_holds(&p);
            let (mismatch, error) = match &back {
                Ok(m) => (m.clone(), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let passed = shift && error.is_none() && mismatch.is_none();
            let report = json!({
                "image": a.to_file(),
                "series": hilbert_series(&a).to_file(),
                "hilbert_shift": shift,
                "roundtrip": { "direction": direction, "mismatch": mismatch, "error": error, "passed": error.is_none() && mismatch.is_none() },
            });
            Ok(Outcome::checked(report, passed))
        }
        FunctorArg::GStr | FunctorArg::GAtr => {
            let a = algebra_via_input(op, alg, common)?.ok_or_else(|| UsageError("needs --algebra <preset> or --input <algebra.json>".into()))?;
            let (direction, image) = if which == FunctorArg::GStr {
                (Direction::Str, functor_g_str(a.get()))
            } else {
                (Direction::Atr, functor_g_atr(a.get()))
            };
            let p = match image {
                Ok(p) => p,
                Err(e) => return Ok(Outcome::checked(json!({ "error": e.to_string() }), false)),
            };
            let rt = functors::roundtrip_check(a.get(), direction).expect("image already built");
            let passed = rt.passed;
            Ok(Outcome::checked(json!({ "image": p.to_file(), "series": p.hilbert_series().to_file(), "roundtrip": rt }), passed))
        }
    }
}

fn cmd_axioms(op: &OperadSource, common: &CommonArgs) -> CmdResult {
    let p = require_operad(op, common)?;
    let rep = check_axioms(&p, common.horizon);
    let passed = rep.passed;
    Ok(Outcome::checked(json!({ "operad": p.name(), "report": rep }), passed))
}

fn cmd_hilbert(op: &OperadSource, alg: &AlgebraSource, common: &CommonArgs) -> CmdResult {
    let (h, index, how) = series_of(op, alg, common, false)?;
    let csv = h.to_csv(index);
    Ok(Outcome::ok(json!({ "index": index, "source": how, "series": h.to_file() })).with_csv(csv))
}

fn cmd_gkdim(op: &OperadSource, alg: &AlgebraSource, common: &CommonArgs) -> CmdResult {
    let (h, index, how) = series_of(op, alg, common, true)?;
    if h.horizon() >= 100 {
        let rep = classify_growth(&h)?;
        let passed = !rep.gap_flag;
        Ok(Outcome::checked(json!({ "index": index, "source": how, "growth": rep }), passed))
    } else {
        let est = gk_estimate(&h, h.horizon())?;
        Ok(Outcome::ok(json!({ "index": index, "source": how, "estimate": est, "value": est.value(), "growth": null })))
    }
}

fn cmd_multiplicity(op: &OperadSource, alg: &AlgebraSource, common: &CommonArgs) -> CmdResult {
    let (h, index, how) = series_of(op, alg, common, true)?;
    Ok(Outcome::ok(json!({ "index": index, "source": how, "multiplicity": multiplicity(&h, TailWindow::default()) })))
}

fn cmd_torsion(src: &AlgebraSource, side: SideArg, common: &CommonArgs) -> CmdResult {
    let a = require_algebra(src, common)?;
    let alg = a.get();
    let sides: Vec<Side> = match side {
        SideArg::Left => vec![Side::Left],
        SideArg::Right => vec![Side::Right],
        SideArg::Both => vec![Side::Left, Side::Right],
    };
    let mut passed = true;
    let mut out = Vec::new();
    for s in sides {
        let rep = torsion_elements(alg, s, alg.horizon(), None);
        passed &= rep.torsion_free();
        let torsion: Vec<Value> = rep
            .torsion
            .iter()
            .map(|(d, basis)| {
                let els: Vec<String> = basis.iter().map(|v| format_element(alg, &AlgElement { degree: *d, coeffs: v.clone() })).collect();
                json!({ "degree": d, "basis": els })
            })
            .collect();
        out.push(json!({ "side": rep.side, "max_degree": rep.max_degree, "torsion_free": rep.torsion_free(), "torsion": torsion }));
    }
    Ok(Outcome::checked(json!({ "algebra": alg.name(), "horizon": alg.horizon(), "sides": out }), passed))
}

fn alpha_sequence(a: &dyn GradedAlgebra, choice: AlphaChoice, b: usize) -> Result<Vec<AlgElement>, UsageError> {
    let h = a.horizon();
    let f = a.field();
    Ok(match choice {
        AlphaChoice::Powers => {
            let Some(d) = (1..=h).find(|&d| a.dim(d) > 0) else { return Ok(Vec::new()) };
            let x = graded_algebra::basis_element(a, d, 0);
            let mut out = vec![x.clone()];
            while out.last().unwrap().degree + d <= h {
                let next = multiply(a, out.last().unwrap(), &x)?;
                if crate::linalg::is_zero_vec(f, &next.coeffs) {
                    break;
                }
                out.push(next);
            }
            out
        }
        AlphaChoice::CPowers => (1..).map(|s| s * (b + 1)).take_while(|&d| d <= h).map(|d| graded_algebra::basis_element(a, d, 0)).collect(),
        AlphaChoice::Generators => return Err(UsageError("generator sequences need a word algebra".into())),
    })
}

fn word_generators(a: &NormalWordAlgebra) -> Vec<AlgElement> {
    let mut out = Vec::new();
    for (g, gen) in a.generators().iter().enumerate() {
        if gen.degree > a.horizon() {
            break;
        }
        if let Some(idx) = a.words(gen.degree).iter().position(|w| w == &[g]) {
            out.push(graded_algebra::basis_element(a, gen.degree, idx));
        }
    }
    out
}

fn cmd_saturation(src: &AlgebraSource, d: Option<usize>, alphas: Option<AlphaChoice>, common: &CommonArgs) -> CmdResult {
    let a = require_algebra(src, common)?;
    let choice = alphas.unwrap_or_else(|| a.default_alphas(src.algebra));
    let seq = match (&a, choice) {
        (LoadedAlgebra::Words(w), AlphaChoice::Generators) => word_generators(w),
        _ => alpha_sequence(a.get(), choice, b_source(src.bc_preset, src.bc_b).build(&Field::rationals()).b())?,
    };
    let d = d.unwrap_or(a.get().horizon() / 2);
    let rep = saturation_condition_check(a.get(), &seq, d)?;
    let passed = rep.passed;
    let labels: Vec<String> = seq.iter().map(|x| format_element(a.get(), x)).collect();
    Ok(Outcome::checked(json!({ "algebra": a.get().name(), "alphas": labels, "report": rep }), passed))
}

fn cmd_prime(op: &OperadSource, common: &CommonArgs) -> CmdResult {
    let p = require_operad(op, common)?;
    let v = prime_at_horizon(&p, common.horizon, DEFAULT_PRIME_DIM_CAP);
    let passed = !v.has_witness();
    let note = match &v {
        PrimeVerdict::Witness { .. } => "not prime: nonzero ideals with vanishing composite",
        PrimeVerdict::NoViolationFound { .. } => "no violation found among the candidate ideals up to the horizon",
        PrimeVerdict::Inconclusive { .. } => "inconclusive",
    };
    Ok(Outcome::checked(json!({ "operad": p.name(), "verdict": v, "note": note }), passed))
}

fn cmd_central(op: &OperadSource, arity: Option<usize>, index: usize, common: &CommonArgs) -> CmdResult {
    let p = require_operad(op, common)?;
    let h = common.horizon.min(p.horizon());
    match arity {
        Some(n) => {
            if n == 0 || n > p.horizon() || index >= p.dim(n) {
                return Err(UsageError(format!("no basis element {index} in arity {n}")));
            }
            let v = is_central(&p, &p.basis_element(n, index), h);
            let passed = v.central_at_horizon;
            Ok(Outcome::checked(json!({ "operad": p.name(), "element": p.label(n, index), "verdict": v }), passed))
        }
        None => {
            let mut rows = Vec::new();
            for n in 1..=h {
                for b in 0..p.dim(n) {
                    let v = is_central(&p, &p.basis_element(n, b), h);
                    rows.push(json!({ "arity": n, "index": b, "label": p.label(n, b), "central": v.central_at_horizon, "witness": v.witness }));
                }
            }
            Ok(Outcome::ok(json!({ "operad": p.name(), "horizon": h, "elements": rows })))
        }
    }
}

fn cmd_classify(op: &OperadSource, common: &CommonArgs) -> CmdResult {
    let p = require_operad(op, common)?;
    let per_arity: Vec<Value> = (1..=p.horizon()).map(|n| json!({ "arity": n, "dim": p.dim(n), "action": classify_triviality(&p, n) })).collect();
    let h = p.hilbert_series();
    let growth = if h.horizon() >= 100 { Some(classify_growth(&h)?) } else { None };
    let gk = gk_estimate(&h, h.horizon().max(2).min(h.horizon()))?;
    let m = multiplicity(&h, TailWindow::default());
    Ok(Outcome::ok(json!({ "operad": p.name(), "arities": per_arity, "gk_estimate": gk.value(), "growth": growth, "multiplicity": m })))
}

fn cmd_example(name: ExampleName, mode: Option<ModeArg>, schedule: &[usize], stages: Option<usize>, levels: Option<usize>, common: &CommonArgs, horizon_given: bool) -> CmdResult {
    match name {
        ExampleName::FieldTower => {
            let n = if horizon_given { common.horizon } else { 10_000 };
            let cfg = FieldTowerConfig::binary(levels.unwrap_or(4), n)?;
            let r = field_tower_series(&cfg)?;
            let csv = r.series.to_dense()?.to_csv("degree");
            let passed = r.passed;
            Ok(Outcome::checked(r, passed).with_csv(csv))
        }
        ExampleName::NestedRepeat => {
            let cfg = match mode.unwrap_or(if schedule.is_empty() { ModeArg::Exponential } else { ModeArg::Custom }) {
                ModeArg::Custom => {
                    let s = if schedule.is_empty() { vec![1, 5, 40] } else { schedule.to_vec() };
                    NestedRepeatConfig::custom(s)
                }
                ModeArg::Exponential => NestedRepeatConfig { mode: ScheduleMode::Exponential { d1: schedule.first().copied().unwrap_or(1) as u64 }, s_max: stages.unwrap_or(3) },
            };
            let r = nested_repeat_pipeline(&cfg)?;
            let passed = r.passed;
            Ok(Outcome::checked(r, passed))
        }
        ExampleName::Squarefree => {
            let h = if horizon_given { common.horizon } else { 512 };
            let r = squarefree_pipeline(h)?;
            let passed = r.passed;
            Ok(Outcome::checked(r, passed))
        }
        ExampleName::Multiplicity => {
            let h = if horizon_given { common.horizon } else { 40 };
            let r = multiplicity_example(h)?;
            let passed = r.passed;
            Ok(Outcome::checked(r, passed))
        }
    }
}

fn dispatch(cli: &Cli, horizon_given: bool) -> CmdResult {
    let c = &cli.common;
    match &cli.command {
        Command::Family { kind, w, b } => cmd_family(kind, *w, b, c),
        Command::Algebra { source } => cmd_algebra(source, c),
        Command::Functor { which, operad, algebra } => cmd_functor(*which, operad, algebra, c),
        Command::Axioms { operad } => cmd_axioms(operad, c),
        Command::Hilbert { operad, algebra } => cmd_hilbert(operad, algebra, c),
        Command::Gkdim { operad, algebra } => cmd_gkdim(operad, algebra, c),
        Command::Multiplicity { operad, algebra } => cmd_multiplicity(operad, algebra, c),
        Command::Torsion { algebra, side } => cmd_torsion(algebra, *side, c),
        Command::Saturation { algebra, d, alphas } => cmd_saturation(algebra, *d, *alphas, c),
        Command::Prime { operad } => cmd_prime(operad, c),
        Command::Central { operad, arity, index } => cmd_central(operad, *arity, *index, c),
        Command::Classify { operad } => cmd_classify(operad, c),
        Command::Example { name, mode, schedule, stages, levels } => cmd_example(*name, *mode, schedule, *stages, *levels, c, horizon_given),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Family { .. } => "family",
        Command::Algebra { .. } => "algebra",
        Command::Functor { .. } => "functor",
        Command::Axioms { .. } => "axioms",
        Command::Hilbert { .. } => "hilbert",
        Command::Gkdim { .. } => "gkdim",
        Command::Multiplicity { .. } => "multiplicity",
        Command::Torsion { .. } => "torsion",
        Command::Saturation { .. } => "saturation",
        Command::Prime { .. } => "prime",
        Command::Central { .. } => "central",
        Command::Classify { .. } => "classify",
        Command::Example { .. } => "example",
    }
}

fn emit(text: &str, out_path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), UsageError> {
    match out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| UsageError(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(UsageError::from),
    }
}

/// Parse `argv` (including the program name), run the command, and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let horizon_given = argv.iter().any(|a| a.to_str().is_some_and(|s| s == "--horizon" || s.starts_with("--horizon=")));
    if let Some(t) = cli.common.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let outcome = match dispatch(&cli, horizon_given) {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    let text = match cli.common.format {
        Format::Json => {
            let envelope = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command_name(&cli.command),
                "field": cli.common.field,
                "horizon": cli.common.horizon,
                "seed": cli.common.seed,
                "passed": outcome.passed,
                "report": outcome.report,
            });
            serde_json::to_string_pretty(&envelope).expect("serializable") + "\n"
        }
        Format::Csv => match outcome.csv {
            Some(csv) => csv,
            None => {
                let _ = writeln!(stderr, "error: `{}` has no CSV form; use --format json", command_name(&cli.command));
                return 2;
            }
        },
    };
    if let Err(UsageError(msg)) = emit(&text, cli.common.out.as_ref(), stdout) {
        let _ = writeln!(stderr, "error: {msg}");
        return 2;
    }
    if outcome.passed {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("operadkit").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn hilbert_csv_rows() {
        let (code, text) = go(&["hilbert", "--family", "com", "--horizon", "20", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "arity,dim");
        assert_eq!(lines.len(), 22);
        assert_eq!(lines[1], "0,0");
        assert!(lines[2..].iter().all(|l| l.ends_with(",1")));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(go(&["axioms", "--family", "mas", "--horizon", "7"]).0, 0);
        let (code, text) = go(&["prime", "--family", "mas", "--horizon", "10"]);
        assert_eq!(code, 1);
        assert!(text.contains("witness"));
        assert_eq!(go(&["axioms"]).0, 2);
        assert_eq!(go(&["bogus"]).0, 2);
        assert_eq!(go(&["axioms", "--input", "/nonexistent.json"]).0, 2);
    }
}
