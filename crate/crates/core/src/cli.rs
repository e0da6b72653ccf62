//! Command-line surface. Every subcommand returns a JSON payload tagged with
//! a `schema` key; `main` prints it, or a short text rendering without
//! `--json`.

use std::path::Path;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::building::{
    are_conjugate, are_stably_conjugate, cayley, conjugacy_invariant, default_radius, fl_check_bounded,
    kappa_orbital_bounded, matched_element, oracle_elliptic_count, oracle_split_window, root_normalization,
    stable_class_reps, classify_centralizer, fixed_vertex_count_bounded, CentralizerKind, HElement, HKind, KappaMode,
    RegularElement,
};
use crate::endoscopy::{describe, enumerate_endoscopic, is_elliptic, TorsionCharacter, DEFAULT_ORDER_BOUND};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::local_field::{
    eval_expr, jordan_decompose, jordan_decompose_matrix, prime_power, FMatrix, FieldElement, FieldKind, LocalField,
    QuadExtElement, DEFAULT_PRECISION,
};
use crate::root_datum::{builtin_datum, RootDatum};
use crate::tori_cohomology::{embeds_as_cartan, h1, kappa_character, GaloisLattice};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "endoscopy", version, about = "Unramified endoscopy and SL(2) orbital integrals")]
struct Cli {
    /// Emit the JSON payload instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Residue field size (a prime power, odd).
    #[arg(long)]
    q: Option<u64>,
    /// Residue characteristic; `--p 3` means `q = 3`.
    #[arg(long)]
    p: Option<u64>,
    /// `mixed` (Q_p) or `equal` (F_q((t))).
    #[arg(long = "char")]
    kind: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Args, Debug, Clone)]
struct ElementArgs {
    /// `a,b` for `a + b√u ∈ E¹`, or a single expression for `γ ∈ F^×`.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// `γ = (1 + y√u)/(1 − y√u)` for the given `y`.
    #[arg(long, allow_hyphen_values = true)]
    cayley: Option<String>,
    /// `UE1`, `Gm` or `G`.
    #[arg(long = "H")]
    h: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Unramified endoscopic data up to isomorphism, with ellipticity.
    Endoscopy {
        /// Built-in name (`sl2`, `pgl2`, `gl3`, `u3`, …) or a JSON file.
        #[arg(long)]
        datum: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        order_bound: u32,
    },
    /// `H¹(F, T)` via Tate–Nakayama.
    H1 {
        /// JSON file (or inline JSON) `{"rank": r, "generators": [...]}`.
        #[arg(long)]
        lattice: String,
    },
    /// The character of `H¹(F, T)` induced by `s`.
    Kappa {
        #[arg(long)]
        lattice: String,
        /// Comma-separated rotation numbers, e.g. `1/2`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Whether a torus with Frobenius `theta` embeds as a Cartan subgroup.
    Embed {
        #[arg(long)]
        datum: String,
        /// Integer matrix as JSON rows.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Also search identifications `X*(T) ≅ X*(T_G)`.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Topological Jordan decomposition.
    Jordan {
        #[command(flatten)]
        field: FieldArgs,
        /// A unit, as an expression.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Check this many random units instead.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Stable and rational conjugacy of two elements of `SL(2, F)`.
    Conjugacy {
        #[command(flatten)]
        field: FieldArgs,
        /// Pass twice.
        #[arg(long, num_args = 1, action = clap::ArgAction::Append, allow_hyphen_values = true)]
        matrix: Vec<String>,
    },
    /// Fixed-vertex counts per rational class in a stable class.
    Count {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Search radius.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Both sides of `Λ_{G,H}(γ) = Λ^st_H(γ)`.
    Fl {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Brute-force recount over a ball of the tree, next to the search count.
    Oracle {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Ball radius; defaults to `d + 3`.
        #[arg(long)]
        bound: Option<i64>,
    },
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub exit_code: i32,
    pub payload: Value,
    /// Human-readable rendering of the payload.
    pub text: Vec<String>,
    /// Lines meant for stderr.
    pub diagnostics: Vec<String>,
    pub json: bool,
}

impl CommandResult {
    pub fn is_ok(&self) -> bool {
        self.exit_code == 0
    }

    fn failure(code: i32, msg: String, json: bool) -> Self {
        CommandResult {
            exit_code: code,
            payload: json!({"schema": "error/1", "status": "error", "message": msg}),
            text: Vec::new(),
            diagnostics: vec![msg],
            json,
        }
    }
}

struct Output {
    payload: Value,
    text: Vec<String>,
}

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let mut r = CommandResult::failure(code, e.to_string(), false);
            if code == 0 {
                r.payload = Value::Null;
                r.diagnostics.clear();
                r.text = vec![e.to_string()];
            }
            return r;
        }
    };
    let json = cli.json;
    match dispatch(cli.cmd) {
        Ok(out) => {
            let mut payload = out.payload;
            payload["status"] = json!("ok");
            CommandResult { exit_code: 0, payload, text: out.text, diagnostics: Vec::new(), json }
        }
        Err(Error::Input(msg)) if msg.starts_with("usage: ") => {
            CommandResult::failure(2, msg.trim_start_matches("usage: ").to_string(), json)
        }
        Err(e) => CommandResult::failure(1, e.to_string(), json),
    }
}

fn usage(msg: &str) -> Error {
    Error::Input(format!("usage: {msg}"))
}

fn dispatch(cmd: Cmd) -> Result<Output> {
    match cmd {
        Cmd::Endoscopy { datum, order_bound } => cmd_endoscopy(&datum, order_bound),
        Cmd::H1 { lattice } => cmd_h1(&lattice),
        Cmd::Kappa { lattice, s } => cmd_kappa(&lattice, &s),
        Cmd::Embed { datum, theta, exhaustive } => cmd_embed(&datum, &theta, exhaustive),
        Cmd::Jordan { field, x, matrix, samples, seed } => cmd_jordan(&field, x, matrix, samples, seed),
        Cmd::Conjugacy { field, matrix } => cmd_conjugacy(&field, &matrix),
        Cmd::Count { field, element, matrix, bound } => cmd_count(&field, &element, matrix, bound),
        Cmd::Fl { field, element, bound } => cmd_fl(&field, &element, bound),
        Cmd::Oracle { field, element, matrix, bound } => cmd_oracle(&field, &element, matrix, bound),
    }
}

fn read_source(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Input(format!("{arg}: {e}")))
}

fn load_datum(arg: &str) -> Result<RootDatum> {
    let t = arg.trim_start();
    if t.starts_with('{') || Path::new(arg).is_file() {
        return RootDatum::from_json(&read_source(arg)?);
    }
    let split = arg.find(|c: char| c.is_ascii_digit()).unwrap_or(arg.len());
    let (fam, n) = arg.split_at(split);
    match fam.to_ascii_lowercase().as_str() {
        "sl" | "pgl" => builtin_datum(arg, 0),
        _ => builtin_datum(fam, n.parse().unwrap_or(0)),
    }
}

fn build_field(a: &FieldArgs) -> Result<LocalField> {
    let q = match (a.q, a.p) {
        (Some(q), None) => q,
        (None, Some(p)) => p,
        (Some(q), Some(p)) => {
            if prime_power(q).map(|(pp, _)| pp) != Some(p) {
                return Err(Error::InvalidField(format!("q = {q} is not a power of p = {p}")));
            }
            q
        }
        (None, None) => return Err(usage("--q or --p is required")),
    };
    let (p, f) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
    let kind = match &a.kind {
        Some(k) => k.parse::<FieldKind>()?,
        None if f == 1 => FieldKind::Mixed,
        None => FieldKind::EqualChar,
    };
    LocalField::new(p, f, kind, a.precision)
}

fn field_json(f: &LocalField) -> Value {
    json!({"q": f.q(), "p": f.p(), "kind": format!("{:?}", f.kind()), "precision": f.precision(), "u": f.u().to_json()})
}

fn cmd_endoscopy(name: &str, order_bound: u32) -> Result<Output> {
    let datum = load_datum(name)?;
    let list = enumerate_endoscopic(&datum, order_bound)?;
    let mut classes = Vec::new();
    let mut text = vec![format!("{} unramified endoscopic data for {}", list.len(), datum.name.as_deref().unwrap_or(name))];
    for e in &list {
        let ell = is_elliptic(e, &datum)?;
        let mut j = e.to_json();
        j["elliptic"] = json!(ell);
        j["description"] = json!(describe(e));
        text.push(format!(
            "  s = ({}), {}{}",
            e.s.to_strings().join(", "),
            describe(e),
            if ell { ", elliptic" } else { "" }
        ));
        classes.push(j);
    }
    let elliptic = classes.iter().filter(|c| c["elliptic"] == json!(true)).count();
    Ok(Output {
        payload: json!({"schema": "endoscopy/1", "datum": datum, "count": list.len(), "elliptic_count": elliptic, "classes": classes}),
        text,
    })
}

fn cmd_h1(src: &str) -> Result<Output> {
    let lattice = GaloisLattice::from_json(&read_source(src)?)?;
    let g = h1(&lattice)?;
    let text = vec![if g.is_trivial() {
        "H¹ = 0".to_string()
    } else {
        format!("H¹ = {}", g.invariant_factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" ⊕ "))
    }];
    Ok(Output {
        payload: json!({"schema": "h1/1", "invariant_factors": g.invariant_factors, "generators": g.generators}),
        text,
    })
}

fn cmd_kappa(src: &str, s: &str) -> Result<Output> {
    let lattice = GaloisLattice::from_json(&read_source(src)?)?;
    let s = TorsionCharacter::parse(s)?;
    let k = kappa_character(&s, &lattice)?;
    let factors = k.group.invariant_factors.clone();
    let mut table = Vec::new();
    let mut text = Vec::new();
    let total: i64 = factors.iter().product();
    for idx in 0..total {
        let mut r = idx;
        let coords: Vec<i64> = factors
            .iter()
            .map(|&d| {
                let c = r % d;
                r /= d;
                c
            })
            .collect();
        let v = k.evaluate(&coords);
        let v = format!("{}/{}", v.numer(), v.denom());
        text.push(format!("  κ{coords:?} = exp(2πi·{v})"));
        table.push(json!({"class": coords, "value": v}));
    }
    text.insert(0, format!("κ is {}trivial", if k.is_trivial() { "" } else { "non" }));
    Ok(Output {
        payload: json!({
            "schema": "kappa/1",
            "invariant_factors": factors,
            "generators": k.group.generators,
            "values": k,
            "trivial": k.is_trivial(),
            "table": table,
        }),
        text,
    })
}

fn cmd_embed(datum: &str, theta: &str, exhaustive: bool) -> Result<Output> {
    let datum = load_datum(datum)?;
    let theta: IntMatrix = serde_json::from_str(theta).map_err(|e| Error::Input(format!("theta: {e}")))?;
    let ok = embeds_as_cartan(&theta, &datum, exhaustive)?;
    Ok(Output { payload: json!({"schema": "embed/1", "embeds": ok}), text: vec![format!("embeds: {ok}")] })
}

fn random_unit(field: &LocalField, rng: &mut StdRng) -> Result<FieldElement> {
    let bound = match field.kind() {
        FieldKind::Mixed => field.p(),
        FieldKind::EqualChar => field.q(),
    } as u32;
    let mut digits: Vec<u32> = (0..field.precision()).map(|_| rng.gen_range(0..bound)).collect();
    digits[0] = rng.gen_range(1..bound);
    field.from_digits(0, &digits)
}

/// Random units checked for `x_s x_u = x`, `x_s^q = x_s` and `x_u ≡ 1`.
pub fn jordan_samples(field: &LocalField, samples: usize, seed: u64) -> Result<(usize, Vec<String>)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let one = field.one();
    let mut failures = Vec::new();
    for i in 0..samples {
        let x = random_unit(field, &mut rng)?;
        let (s, u) = jordan_decompose(&x)?;
        let ok = (&s * &u).same_at_precision(&x)
            && s.pow_u(field.q()).same_at_precision(&s)
            && u.agrees_with(&one, 1)?;
        if !ok {
            failures.push(format!("sample {i}: x = {x}"));
        }
    }
    Ok((samples - failures.len(), failures))
}

fn cmd_jordan(
    fa: &FieldArgs,
    x: Option<String>,
    matrix: Option<String>,
    samples: Option<usize>,
    seed: u64,
) -> Result<Output> {
    let field = build_field(fa)?;
    match (x, matrix, samples) {
        (Some(x), None, None) => {
            let x = eval_expr(&x, &field)?;
            let (s, u) = jordan_decompose(&x)?;
            Ok(Output {
                text: vec![format!("x_s = {s}"), format!("x_u = {u}")],
                payload: json!({"schema": "jordan/1", "field": field_json(&field), "x_s": s.to_json(), "x_u": u.to_json()}),
            })
        }
        (None, Some(m), None) => {
            let m = FMatrix::parse(&m, &field)?;
            let (s, u) = jordan_decompose_matrix(&m)?;
            let rows = |m: &FMatrix| -> Value {
                json!(m.to_rows().iter().map(|r| r.iter().map(FieldElement::to_json).collect::<Vec<_>>()).collect::<Vec<_>>())
            };
            Ok(Output {
                text: vec![format!("x_s = {:?}", s.to_rows()), format!("x_u = {:?}", u.to_rows())],
                payload: json!({"schema": "jordan/1", "field": field_json(&field), "x_s": rows(&s), "x_u": rows(&u)}),
            })
        }
        (None, None, Some(n)) => {
            let (passed, failures) = jordan_samples(&field, n, seed)?;
            Ok(Output {
                text: std::iter::once(format!("{passed}/{n} samples pass (seed {seed})")).chain(failures.clone()).collect(),
                payload: json!({"schema": "jordan-samples/1", "field": field_json(&field), "seed": seed, "samples": n, "passed": passed, "failures": failures}),
            })
        }
        _ => Err(usage("jordan takes exactly one of --x, --matrix, --samples")),
    }
}

fn cmd_conjugacy(fa: &FieldArgs, matrices: &[String]) -> Result<Output> {
    if matrices.len() != 2 {
        return Err(usage("conjugacy takes --matrix twice"));
    }
    let field = build_field(fa)?;
    let g1 = RegularElement::parse(&matrices[0], &field)?;
    let g2 = RegularElement::parse(&matrices[1], &field)?;
    let stable = are_stably_conjugate(&g1, &g2)?;
    let rational = stable && are_conjugate(&g1, &g2)?;
    let mut payload = json!({"schema": "conjugacy/1", "field": field_json(&field), "stable": stable, "rational": rational});
    if stable && classify_centralizer(&g1)? != CentralizerKind::Split {
        payload["invariant"] = json!(conjugacy_invariant(&g1, &g2)?.to_json());
    }
    Ok(Output { payload, text: vec![format!("stably conjugate: {stable}"), format!("conjugate: {rational}")] })
}

fn split_gamma(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).collect()
}

fn parse_h_element(field: &LocalField, e: &ElementArgs) -> Result<(HElement, HKind)> {
    let gamma = match (&e.gamma, &e.cayley) {
        (Some(g), None) => {
            let parts = split_gamma(g);
            match parts.as_slice() {
                [a] => HElement::Split(eval_expr(a, field)?),
                [a, b] => HElement::Elliptic(QuadExtElement::new(eval_expr(a, field)?, eval_expr(b, field)?)),
                _ => return Err(usage("--gamma takes `a,b` or a single expression")),
            }
        }
        (None, Some(y)) => HElement::Elliptic(cayley(&eval_expr(y, field)?)?),
        _ => return Err(usage("give exactly one of --gamma, --cayley")),
    };
    let h = match &e.h {
        Some(h) => h.parse::<HKind>()?,
        None => match gamma {
            HElement::Elliptic(_) => HKind::UE1,
            HElement::Split(_) => HKind::Gm,
        },
    };
    Ok((gamma, h))
}

fn g_element(field: &LocalField, e: &ElementArgs, matrix: Option<String>) -> Result<RegularElement> {
    match matrix {
        Some(m) if e.gamma.is_none() && e.cayley.is_none() => RegularElement::parse(&m, field),
        Some(_) => Err(usage("give either --matrix or --gamma/--cayley")),
        None => {
            let (gamma, h) = parse_h_element(field, e)?;
            matched_element(&gamma, h)
        }
    }
}

fn cmd_count(fa: &FieldArgs, e: &ElementArgs, matrix: Option<String>, bound: Option<i64>) -> Result<Output> {
    let field = build_field(fa)?;
    let g = g_element(&field, e, matrix)?;
    let radius = bound.unwrap_or_else(|| default_radius(&field));
    let report = kappa_orbital_bounded(&g, KappaMode::Endoscopic, radius)?;
    let mut payload = report.to_json();
    payload["schema"] = json!("count/1");
    payload["field"] = field_json(&field);
    payload["bound"] = json!(radius);
    let text = report
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            format!(
                "class {i}: κ = {:+}, fixed vertices = {}{}",
                c.kappa,
                c.count.count,
                if c.count.certified { "" } else { " (bound reached)" }
            )
        })
        .collect();
    Ok(Output { payload, text })
}

fn cmd_fl(fa: &FieldArgs, e: &ElementArgs, bound: Option<i64>) -> Result<Output> {
    let field = build_field(fa)?;
    let (gamma, h) = parse_h_element(&field, e)?;
    let radius = bound.unwrap_or_else(|| default_radius(&field));
    let r = fl_check_bounded(&gamma, h, radius)?;
    let mut payload = r.to_json();
    payload["schema"] = json!("fl/1");
    payload["field"] = field_json(&field);
    Ok(Output {
        payload,
        text: vec![format!("Λ_G,H = {}", r.lhs.value), format!("Λ^st_H = {}", r.rhs), format!("equal = {}", r.equal)],
    })
}

fn cmd_oracle(fa: &FieldArgs, e: &ElementArgs, matrix: Option<String>, bound: Option<i64>) -> Result<Output> {
    let field = build_field(fa)?;
    let g = g_element(&field, e, matrix)?;
    let d = root_normalization(&g)?.d.max(0);
    let radius = bound.unwrap_or(d + 3);
    let split = classify_centralizer(&g)? == CentralizerKind::Split;
    let mut classes = Vec::new();
    let mut text = Vec::new();
    let mut agree = true;
    for (i, r) in stable_class_reps(&g)?.into_iter().enumerate() {
        let brute = if split { oracle_split_window(&r.element, radius)? } else { oracle_elliptic_count(&r.element, radius)? };
        let search = fixed_vertex_count_bounded(&r.element, default_radius(&field))?;
        agree &= brute == search.count;
        text.push(format!("class {i}: oracle = {brute}, search = {}", search.count));
        classes.push(json!({
            "representative": r.element.to_json(),
            "kappa": r.kappa,
            "oracle_count": brute,
            "search_count": search.count,
        }));
    }
    text.push(format!("agree = {agree}"));
    Ok(Output {
        payload: json!({"schema": "oracle/1", "field": field_json(&field), "bound": radius, "classes": classes, "agree": agree}),
        text,
    })
}
