//! Request handling shared by the command line and the HTTP service.
//!
//! Every operation takes a JSON request body and produces a JSON reply.
//! The command line builds the same request the service would receive and
//! prints the same bytes, so the two frontends cannot drift apart.

use contact_core::contact::{
    check_contact, ContactError, ContactForm, ContactSummary, Domain, FailureReport, GridOptions,
};
use contact_core::expr::ParseError;
use contact_core::foliation::svg::{dividing_svg, foliation_svg};
use contact_core::foliation::{
    check_genus_bound, dividing_set, foliate, overtwisted_witness, pullback, DividingSetReport, FoliationError,
    FoliationOptions, FoliationReport, GenusBound, ReportStatus, Surface, SurfaceSpec, Topology, WitnessReport,
};
use contact_core::forms::{parse_one_form, DifferentialForm, FormError};
use contact_core::fronts::{
    apply_move, available_moves, front_geometry, invariants, legendrian_approximate, orient, parse_front,
    stabilize_oriented, underlying_diagram, ApproxError, ApproxOptions, Approximation, FrontError, FrontGeometry,
    FrontWord, InvariantReport, Move, OrientedFront, Site, StabilizationSign,
};
use contact_core::seifert::{
    bennequin_check, knot_proxies, seifert_surface, BennequinReport, KnotProxies, SeifertData, SeifertError,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const CONTACT_CHECK: &str = "/api/contact/check";
pub const FOLIATION_RUN: &str = "/api/foliation/run";
pub const DIVIDING_SET: &str = "/api/foliation/dividing-set";
pub const FRONT_PARSE: &str = "/api/front/parse";
pub const FRONT_INVARIANTS: &str = "/api/front/invariants";
pub const FRONT_BENNEQUIN: &str = "/api/front/bennequin";
pub const FRONT_MOVE: &str = "/api/front/move";
pub const FRONT_STABILIZE: &str = "/api/front/stabilize";
pub const FRONT_GEOMETRY: &str = "/api/front/geometry";
pub const FRONT_APPROXIMATE: &str = "/api/front/approximate";

/// Every POST route, in the order they are documented.
pub const ROUTES: [&str; 10] = [
    CONTACT_CHECK,
    FOLIATION_RUN,
    DIVIDING_SET,
    FRONT_PARSE,
    FRONT_INVARIANTS,
    FRONT_BENNEQUIN,
    FRONT_MOVE,
    FRONT_STABILIZE,
    FRONT_GEOMETRY,
    FRONT_APPROXIMATE,
];

pub const MAX_CONTACT_GRID: usize = 128;
pub const MAX_CHART_GRID: usize = 1024;
pub const MAX_SAMPLES: usize = 256;
pub const MAX_POINTS: usize = 100_000;
const DEFAULT_BOX: [f64; 2] = [-1.0, 1.0];
const DEFAULT_SAMPLES: usize = 8;

/// Outcome class of a request. Maps to an HTTP status and an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Malformed or out-of-range input, or a failed precondition.
    Invalid,
    /// The computation itself could not deliver a result.
    Numeric,
    NotFound,
}

impl Status {
    pub fn http(self) -> u16 {
        match self {
            Status::Ok => 200,
            Status::Invalid => 422,
            Status::Numeric => 500,
            Status::NotFound => 404,
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Invalid | Status::NotFound => 2,
            Status::Numeric => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Svg,
}

/// Error body shared by every route and by the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    /// Byte offset in an expression, or 1-based event index in a word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub status: Status,
    pub body: ErrorBody,
}

impl Failure {
    fn new(status: Status, rule: &str, location: Option<usize>, error: impl Into<String>) -> Self {
        Failure {
            status,
            body: ErrorBody {
                error: error.into(),
                location,
                rule: Some(rule.to_string()),
            },
        }
    }

    pub fn invalid(rule: &str, error: impl Into<String>) -> Self {
        Failure::new(Status::Invalid, rule, None, error)
    }

    fn numeric(rule: &str, error: impl Into<String>) -> Self {
        Failure::new(Status::Numeric, rule, None, error)
    }

    pub fn to_json(&self) -> String {
        json_line(&self.body)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        let rule = match e {
            ParseError::Syntax { .. } => "syntax",
            ParseError::UnknownIdentifier { .. } => "unknown_identifier",
            ParseError::Arity { .. } => "arity",
            ParseError::NotOneForm { .. } => "not_one_form",
        };
        Failure::new(Status::Invalid, rule, Some(e.offset()), e.to_string())
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        match e {
            FormError::Parse(p) => p.into(),
            FormError::Eval(_) => Failure::invalid("evaluation", e.to_string()),
            _ => Failure::invalid("degree", e.to_string()),
        }
    }
}

impl From<ContactError> for Failure {
    fn from(e: ContactError) -> Self {
        let rule = match &e {
            ContactError::NotContact(_) => "not_contact",
            ContactError::NotOneForm(_) => "not_one_form",
            ContactError::Resolution(_) => "range",
            ContactError::BadDomain(_) => "domain",
            ContactError::NotPeriodic { .. } => "not_periodic",
            ContactError::DegenerateKernel(_) => "degenerate",
            ContactError::Eval(_) => "evaluation",
            ContactError::Form(f) => return f.clone().into(),
        };
        Failure::invalid(rule, e.to_string())
    }
}

impl From<FoliationError> for Failure {
    fn from(e: FoliationError) -> Self {
        let rule = match &e {
            FoliationError::Surface(_) => "surface",
            FoliationError::Parse { field, source } => {
                let mut f = Failure::from(source.clone());
                f.body.error = format!("{field}: {}", f.body.error);
                return f;
            }
            FoliationError::NotImmersed { .. } => "not_immersed",
            FoliationError::Periodicity { .. } => "periodicity",
            FoliationError::Resolution(..) | FoliationError::StepUnderflow(_) | FoliationError::Options(_) => "range",
            FoliationError::ImmediateSingularity(_) => "singular_seed",
            FoliationError::Degenerate => return Failure::numeric("degenerate", e.to_string()),
            FoliationError::OpenSurface(_) | FoliationError::WrongTopology { .. } => "topology",
            FoliationError::Contact(c) => return c.clone().into(),
        };
        Failure::invalid(rule, e.to_string())
    }
}

fn rule_name(e: &FrontError) -> String {
    serde_json::to_value(e.rule)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{:?}", e.rule))
}

impl From<FrontError> for Failure {
    fn from(e: FrontError) -> Self {
        Failure::new(Status::Invalid, &rule_name(&e), e.location, e.message)
    }
}

impl From<SeifertError> for Failure {
    fn from(e: SeifertError) -> Self {
        Failure::numeric("seifert", e.to_string())
    }
}

impl From<ApproxError> for Failure {
    fn from(e: ApproxError) -> Self {
        match e {
            ApproxError::Epsilon(_) => Failure::invalid("range", e.to_string()),
            ApproxError::Polyline => Failure::invalid("polyline", e.to_string()),
            ApproxError::Unreachable { .. } => Failure::numeric("unreachable", e.to_string()),
            // the constructed curve failed to read back as a front
            ApproxError::Front(f) => Failure::new(Status::Numeric, &rule_name(&f), f.location, f.message),
        }
    }
}

/// A finished request: the JSON body, or the SVG drawing when one was asked
/// for and the route has one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reply {
    pub status: Status,
    pub content_type: &'static str,
    pub body: String,
}

impl Reply {
    fn json(status: Status, body: String) -> Self {
        Reply {
            status,
            content_type: "application/json",
            body,
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Answers a POST to `route` with a JSON reply.
pub fn handle(route: &str, body: &[u8]) -> Reply {
    run(route, body, Format::Json)
}

/// Like [`handle`], optionally asking for the SVG drawing instead.
pub fn run(route: &str, body: &[u8], format: Format) -> Reply {
    let result = match route {
        CONTACT_CHECK => respond(body, contact_check),
        FOLIATION_RUN => respond_drawn(body, format, foliation_run),
        DIVIDING_SET => respond_drawn(body, format, dividing),
        FRONT_PARSE => respond(body, front_parse),
        FRONT_INVARIANTS => respond(body, front_invariants),
        FRONT_BENNEQUIN => respond(body, front_bennequin),
        FRONT_MOVE => respond(body, front_move),
        FRONT_STABILIZE => respond(body, front_stabilize),
        FRONT_GEOMETRY => respond_drawn(body, format, front_geometry_route),
        FRONT_APPROXIMATE => respond(body, approximate),
        _ => Err(Failure::new(
            Status::NotFound,
            "route",
            None,
            format!("no such endpoint: {route}"),
        )),
    };
    let result = result.and_then(|(json, svg)| match format {
        Format::Json => Ok(Reply::json(Status::Ok, json)),
        Format::Svg => svg
            .map(|body| Reply {
                status: Status::Ok,
                content_type: "image/svg+xml",
                body,
            })
            .ok_or_else(|| {
                Failure::invalid(
                    "format",
                    "svg output is only available for foliations, dividing sets and front geometry",
                )
            }),
    });
    result.unwrap_or_else(|f| Reply::json(f.status, f.to_json()))
}

fn decode<T: DeserializeOwned>(body: &[u8]) -> Result<T, Failure> {
    serde_json::from_slice(body).map_err(|e| Failure::invalid("schema", e.to_string()))
}

fn respond<Req, Resp>(body: &[u8], f: fn(Req) -> Result<Resp, Failure>) -> Result<(String, Option<String>), Failure>
where
    Req: DeserializeOwned,
    Resp: Serialize,
{
    Ok((json_line(&f(decode(body)?)?), None))
}

/// A response together with its drawing, when one was asked for.
type Drawn<T> = Result<(T, Option<String>), Failure>;

fn respond_drawn<Req, Resp>(
    body: &[u8],
    format: Format,
    f: fn(Req, bool) -> Drawn<Resp>,
) -> Result<(String, Option<String>), Failure>
where
    Req: DeserializeOwned,
    Resp: Serialize,
{
    let (resp, svg) = f(decode(body)?, format == Format::Svg)?;
    Ok((json_line(&resp), svg))
}

fn positive(name: &str, value: f64) -> Result<f64, Failure> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Failure::invalid(
            "range",
            format!("{name} must be positive and finite, got {value}"),
        ))
    }
}

fn within(name: &str, value: usize, lo: usize, hi: usize) -> Result<usize, Failure> {
    if (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(Failure::invalid(
            "range",
            format!("{name} must lie in {lo}..={hi}, got {value}"),
        ))
    }
}

/// The box is `[lo, hi]` for all axes or `[xlo, xhi, ylo, yhi, zlo, zhi]`.
/// A period replaces the `y` and `z` ranges by `[0, period)`.
fn domain(bounds: &[f64], period: Option<[f64; 2]>) -> Result<Domain, Failure> {
    let (lo, hi) = match *bounds {
        [a, b] => ([a; 3], [b; 3]),
        [a, b, c, d, e, f] => ([a, c, e], [b, d, f]),
        _ => {
            return Err(Failure::invalid(
                "domain",
                format!("box needs 2 or 6 numbers, got {}", bounds.len()),
            ))
        }
    };
    let mut d = Domain {
        lo,
        hi,
        period_y: None,
        period_z: None,
    };
    if let Some([py, pz]) = period {
        d = Domain::quotient(lo[0], hi[0], positive("period", py)?, positive("period", pz)?);
    }
    Ok(d)
}

fn one_form(text: &str) -> Result<DifferentialForm, Failure> {
    Ok(parse_one_form(text)?)
}

fn grid_options(grid: Option<usize>, tol: Option<f64>) -> Result<GridOptions, Failure> {
    let d = GridOptions::default();
    Ok(GridOptions {
        resolution: within("grid", grid.unwrap_or(d.resolution), 8, MAX_CONTACT_GRID)?,
        tol: positive("tol", tol.unwrap_or(d.tol))?,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactRequest {
    pub form: String,
    #[serde(default, rename = "box")]
    pub bounds: Option<Vec<f64>>,
    #[serde(default)]
    pub period: Option<[f64; 2]>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Serialize)]
pub struct ContactResponse {
    pub contact: bool,
    pub form: String,
    pub domain: Domain,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<ContactSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureReport>,
}

fn contact_check(req: ContactRequest) -> Result<ContactResponse, Failure> {
    let alpha = one_form(&req.form)?;
    let dom = domain(req.bounds.as_deref().unwrap_or(&DEFAULT_BOX), req.period)?;
    let opts = grid_options(req.grid, req.tol)?;
    let (summary, failure) = match check_contact(&alpha, &dom, opts) {
        Ok(c) => (Some(c.summary().clone()), None),
        Err(ContactError::NotContact(report)) => (None, Some(*report)),
        Err(e) => return Err(e.into()),
    };
    Ok(ContactResponse {
        contact: summary.is_some(),
        form: alpha.to_string(),
        domain: dom,
        summary,
        failure,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceRequest {
    pub form: String,
    pub surface: SurfaceSpec,
    /// Where the contact condition is verified; defaults to the bounding
    /// box of the surface.
    #[serde(default, rename = "box")]
    pub bounds: Option<Vec<f64>>,
    #[serde(default)]
    pub period: Option<[f64; 2]>,
    /// Resolution of the contact verification grid.
    #[serde(default)]
    pub contact_grid: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub options: FoliationOptions,
}

/// Axis ranges of the surface image, padded so that flat directions still
/// give a nondegenerate box.
fn surface_box(s: &Surface) -> Vec<f64> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let n = 64;
    for i in 0..=n {
        for j in 0..=n {
            let p = s.point(i as f64 / n as f64, j as f64 / n as f64);
            for k in 0..3 {
                if p[k].is_finite() {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        if lo[k] > hi[k] {
            return DEFAULT_BOX.to_vec();
        }
        let pad = 0.05 * (hi[k] - lo[k]) + 1e-3;
        out.extend([lo[k] - pad, hi[k] + pad]);
    }
    out
}

struct Prepared {
    alpha: ContactForm,
    surface: Surface,
    form: String,
    spec: SurfaceSpec,
}

fn prepare(req: &SurfaceRequest) -> Result<Prepared, Failure> {
    let form = one_form(&req.form)?;
    let surface = Surface::from_spec(&req.surface)?;
    let bounds = req.bounds.clone().unwrap_or_else(|| surface_box(&surface));
    let dom = domain(&bounds, req.period)?;
    let alpha = check_contact(&form, &dom, grid_options(req.contact_grid, req.tol)?)?;
    within("options.grid", req.options.grid, 32, MAX_CHART_GRID)?;
    req.options.validate()?;
    Ok(Prepared {
        alpha,
        spec: surface.to_spec(),
        surface,
        form: form.to_string(),
    })
}

#[derive(Serialize)]
pub struct FoliationResponse {
    pub form: String,
    pub surface: SurfaceSpec,
    pub report: FoliationReport,
    /// Present for closed surfaces with a nondegenerate census.
    pub genus_bound: Option<GenusBound>,
    /// Present for disks.
    pub witness: Option<WitnessReport>,
}

fn foliation_run(req: SurfaceRequest, draw: bool) -> Drawn<FoliationResponse> {
    let p = prepare(&req)?;
    let report = foliate(&p.alpha, &p.surface, &req.options)?;
    let genus_bound = if p.surface.topology().is_closed() && report.status == ReportStatus::Ok {
        Some(check_genus_bound(&report)?)
    } else {
        None
    };
    let witness = if p.surface.topology() == Topology::Disk {
        Some(overtwisted_witness(&p.alpha, &p.surface, &req.options)?)
    } else {
        None
    };
    let svg = draw.then(|| foliation_svg(&report, p.surface.periodic()));
    Ok((
        FoliationResponse {
            form: p.form,
            surface: p.spec,
            report,
            genus_bound,
            witness,
        },
        svg,
    ))
}

#[derive(Serialize)]
pub struct DividingResponse {
    pub form: String,
    pub surface: SurfaceSpec,
    pub report: DividingSetReport,
}

fn dividing(req: SurfaceRequest, draw: bool) -> Drawn<DividingResponse> {
    let p = prepare(&req)?;
    let report = dividing_set(&pullback(&p.alpha, &p.surface)?, &p.surface, &req.options)?;
    let svg = draw.then(|| dividing_svg(&report, p.surface.periodic()));
    Ok((
        DividingResponse {
            form: p.form,
            surface: p.spec,
            report,
        },
        svg,
    ))
}

fn word(text: &str) -> Result<FrontWord, Failure> {
    Ok(parse_front(text)?)
}

fn oriented(text: &str, reversed: bool) -> Result<OrientedFront, Failure> {
    let f = orient(&word(text)?);
    Ok(if reversed { f.reverse() } else { f })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordRequest {
    pub word: String,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Serialize)]
pub struct ParseResponse {
    pub word: FrontWord,
    pub events: usize,
    pub crossings: usize,
    pub cusps: usize,
    pub max_strands: usize,
    /// Strand count between consecutive events.
    pub profile: Vec<usize>,
    /// Every move whose local pattern matches somewhere in the word.
    pub moves: Vec<Move>,
}

fn front_parse(req: WordRequest) -> Result<ParseResponse, Failure> {
    let w = word(&req.word)?;
    Ok(ParseResponse {
        events: w.len(),
        crossings: w.crossing_count(),
        cusps: w.cusp_count(),
        max_strands: w.max_strands(),
        profile: w.profile(),
        moves: available_moves(&w),
        word: w,
    })
}

/// Classical invariants with the Seifert bound they are measured against.
#[derive(Serialize)]
pub struct InvariantsResponse {
    pub tb: i64,
    pub r: i64,
    pub w: i64,
    pub c: i64,
    pub c_u: i64,
    pub c_d: i64,
    pub l_plus: i64,
    pub l_minus: i64,
    pub word: FrontWord,
    pub reversed: bool,
    pub seifert: SeifertData,
    pub bennequin: BennequinReport,
}

fn invariants_of(f: &OrientedFront) -> Result<InvariantsResponse, Failure> {
    let inv: InvariantReport = invariants(f);
    let seifert = seifert_surface(&underlying_diagram(f)?);
    Ok(InvariantsResponse {
        tb: inv.tb,
        r: inv.r,
        w: inv.w,
        c: inv.c,
        c_u: inv.c_u,
        c_d: inv.c_d,
        l_plus: inv.l_plus,
        l_minus: inv.l_minus,
        word: f.word.clone(),
        reversed: f.reversed,
        seifert,
        bennequin: bennequin_check(&inv, &seifert),
    })
}

fn front_invariants(req: WordRequest) -> Result<InvariantsResponse, Failure> {
    invariants_of(&oriented(&req.word, req.reversed)?)
}

#[derive(Serialize)]
pub struct BennequinResponse {
    #[serde(flatten)]
    pub invariants: InvariantsResponse,
    /// Isotopy invariants of the underlying knot.
    pub knot: KnotProxies,
}

fn front_bennequin(req: WordRequest) -> Result<BennequinResponse, Failure> {
    let f = oriented(&req.word, req.reversed)?;
    let knot = knot_proxies(&underlying_diagram(&f)?)?;
    Ok(BennequinResponse {
        invariants: invariants_of(&f)?,
        knot,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub word: String,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Only report whether the move applies.
    #[serde(default)]
    pub dry_run: bool,
}

#[derive(Serialize)]
pub struct EditResponse {
    pub word: FrontWord,
    pub invariants: InvariantsResponse,
}

#[derive(Serialize)]
pub struct DryRunResponse {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<FrontWord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum MoveResponse {
    Applied(EditResponse),
    DryRun(DryRunResponse),
}

fn front_move(req: MoveRequest) -> Result<MoveResponse, Failure> {
    let w = word(&req.word)?;
    let result = apply_move(&w, req.mv);
    if req.dry_run {
        return Ok(MoveResponse::DryRun(match result {
            Ok(out) => DryRunResponse {
                applicable: true,
                word: Some(out),
                error: None,
            },
            Err(e) => DryRunResponse {
                applicable: false,
                word: None,
                error: Some(Failure::from(e).body),
            },
        }));
    }
    let out = result?;
    Ok(MoveResponse::Applied(EditResponse {
        invariants: invariants_of(&orient(&out))?,
        word: out,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilizeRequest {
    pub word: String,
    pub sign: StabilizationSign,
    pub site: Site,
    /// Signs refer to this orientation of the front.
    #[serde(default)]
    pub reversed: bool,
}

fn front_stabilize(req: StabilizeRequest) -> Result<EditResponse, Failure> {
    let f = oriented(&req.word, req.reversed)?;
    let out = stabilize_oriented(&f, req.sign, req.site)?;
    let g = OrientedFront {
        word: out.clone(),
        reversed: req.reversed,
    };
    Ok(EditResponse {
        invariants: invariants_of(&g)?,
        word: out,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryRequest {
    pub word: String,
    /// Space-curve samples per strand segment.
    #[serde(default)]
    pub samples: Option<usize>,
}

fn front_geometry_route(req: GeometryRequest, draw: bool) -> Drawn<FrontGeometry> {
    let w = word(&req.word)?;
    let samples = within("samples", req.samples.unwrap_or(DEFAULT_SAMPLES), 1, MAX_SAMPLES)?;
    let g = front_geometry(&w, samples)?;
    let svg = draw.then(|| g.svg.clone());
    Ok((g, svg))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproximateRequest {
    /// Vertices of a closed polyline in R^3.
    pub points: Vec<[f64; 3]>,
    pub epsilon: f64,
    #[serde(default)]
    pub options: ApproxOptions,
}

fn approximate(req: ApproximateRequest) -> Result<Approximation, Failure> {
    within("points", req.points.len(), 3, MAX_POINTS)?;
    Ok(legendrian_approximate(&req.points, req.epsilon, &req.options)?)
}
