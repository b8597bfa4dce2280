use serde::Serialize;

use gauss_parity::diagram::{DecoratedDiagram, Level};
use gauss_parity::invariants::{minimality_certificate, parity_bracket_capped, MinimalityCertificate};
use gauss_parity::parity::gaussian_parity;
use gauss_parity::surface::{homological_parity, CarterSurface, SurfaceReport};
use gauss_parity::{Error, Result};

#[derive(Debug, Serialize)]
pub struct SurfaceBlock {
    #[serde(flatten)]
    pub summary: SurfaceReport,
    /// Homological parity of each crossing, as coordinates in the quotient.
    pub hp: Vec<Vec<i64>>,
}

#[derive(Debug, Serialize)]
pub struct BracketBlock {
    pub terms: Vec<String>,
    pub states: usize,
    pub discarded: usize,
}

/// Everything computed from one code. All parts are computed on the
/// canonical form, so any presentation of the diagram gives the same report
/// apart from `input`.
#[derive(Debug, Serialize)]
pub struct InvariantReport {
    pub input: String,
    pub level: Level,
    pub canonical: String,
    pub n: usize,
    pub gp: Vec<u8>,
    pub bracket: BracketBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MinimalityCertificate>,
}

pub fn invariant_report(input: &str, d: &DecoratedDiagram, bracket_cap: usize) -> Result<InvariantReport> {
    let c = d.canonical_form();
    let base = c.base();
    let gp = gaussian_parity(base);
    let detail = parity_bracket_capped(base, &gp, bracket_cap)?;
    let surface = match CarterSurface::new(&c) {
        Ok(s) => {
            let hp = homological_parity(&c, &s)?;
            Some(SurfaceBlock {
                summary: SurfaceReport::new(&s),
                hp: hp.values().iter().map(|v| v.0.clone()).collect(),
            })
        }
        Err(Error::InsufficientDecoration) => None,
        Err(e) => return Err(e),
    };
    Ok(InvariantReport {
        input: input.to_string(),
        level: c.level(),
        canonical: c.to_code(),
        n: c.n(),
        gp: gp.bits(),
        bracket: BracketBlock {
            terms: detail.value.codes(),
            states: detail.states,
            discarded: detail.discarded,
        },
        surface,
        certificate: minimality_certificate(base),
    })
}

impl InvariantReport {
    /// Plain-text view of the report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let bits = |v: &[u8]| v.iter().map(u8::to_string).collect::<Vec<_>>().join("");
        out += &format!("canonical   {}\n", show(&self.canonical));
        out += &format!("crossings   {}\n", self.n);
        out += &format!("gp          {}\n", bits(&self.gp));
        let terms: Vec<&str> = self.bracket.terms.iter().map(|t| show(t)).collect();
        out += &format!("bracket     {{{}}}\n", terms.join(", "));
        if let Some(s) = &self.surface {
            let r = &s.summary;
            out += &format!(
                "surface     V={} E={} F={} chi={} genus={} colourable={} h1={}\n",
                r.v, r.e, r.f, r.chi, r.genus, r.colourable, r.h1_dim
            );
            let hp: Vec<String> = s
                .hp
                .iter()
                .map(|v| if v.is_empty() { "0".into() } else { v.iter().map(i64::to_string).collect() })
                .collect();
            out += &format!("hp          {}\n", hp.join(" "));
        }
        if let Some(c) = &self.certificate {
            out += &format!("certificate all {} crossings odd, no decreasing R2 move\n", c.n);
        }
        out
    }
}

fn show(code: &str) -> &str {
    if code.is_empty() {
        "(empty)"
    } else {
        code
    }
}
