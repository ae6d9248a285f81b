use crate::config::Config;
use crate::enumerate::{check_k, parse_two_nu};
use crate::output::{csv_text, emit, fmt_f64, to_json, usage, Format};
use anyhow::Result;
use hyper3b::basis::admissible_pairs;
use hyper3b::transform::{
    diagonalize_block, omega_block, rotation_coefficient, CoeffForm, TransformError,
};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Rotation coefficients between tree bases for the angle phi.
    Coeffs(CoeffsArgs),
    /// Diagonalize the Omega operator in one (K, J, M, nu) block.
    Omega(OmegaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Form {
    Jacobi,
    Dfunction,
    Overlap,
}

#[derive(Debug, clap::Args)]
pub struct CoeffsArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: i32,
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: i32,
    #[arg(long = "M", default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    /// Evaluation route for the coefficients.
    #[arg(long, value_enum, default_value = "jacobi")]
    pub form: Form,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OmegaArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: i32,
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: i32,
    #[arg(long = "M", default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CoeffsOut {
    k: i32,
    j: i32,
    m: i32,
    phi: f64,
    form: &'static str,
    /// `(j1, j2)` for both rows and columns.
    pairs: Vec<(i32, i32)>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct Component {
    j1: i32,
    j2: i32,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct Eigen {
    omega_index: usize,
    omega: f64,
    components: Vec<Component>,
}

#[derive(Debug, Serialize)]
struct OmegaOut {
    k: i32,
    j: i32,
    m: i32,
    two_nu: i32,
    tags: Vec<(i32, i32)>,
    eigenvalues: Vec<f64>,
    functions: Vec<Eigen>,
}

fn check_jm(k: i32, j: i32, m: i32) -> Result<()> {
    if j < 0 || j > k {
        return usage(format!("J must lie in 0..={k}, got {j}"));
    }
    if m.abs() > j {
        return usage(format!("|M| must not exceed J = {j}, got {m}"));
    }
    Ok(())
}

fn coeffs(a: &CoeffsArgs, cfg: &Config) -> Result<u8> {
    check_k(a.k, cfg)?;
    check_jm(a.k, a.j, a.m)?;
    if !a.phi.is_finite() {
        return usage("phi must be finite");
    }
    if admissible_pairs(a.k, a.j).is_empty() {
        return usage(format!(
            "no tree functions with K = {} and J = {}",
            a.k, a.j
        ));
    }
    let (form, name) = match a.form {
        Form::Jacobi => (CoeffForm::Jacobi, "jacobi"),
        Form::Dfunction => (CoeffForm::DFunction, "dfunction"),
        Form::Overlap => (CoeffForm::Overlap, "overlap"),
    };
    let rc = match rotation_coefficient(a.k, a.j, a.m, a.phi, form) {
        Ok(rc) => rc,
        Err(TransformError::SingularAngle(phi)) => {
            return usage(format!(
                "the dfunction form needs 0 < phi < pi/2, got {phi}"
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let text = match a.format {
        Format::Json => to_json(&CoeffsOut {
            k: rc.k,
            j: rc.j,
            m: rc.m,
            phi: rc.phi,
            form: name,
            pairs: rc.pairs.clone(),
            matrix: rc.matrix.clone(),
        })?,
        Format::Csv => {
            let mut rows = Vec::new();
            for (r, row) in rc.matrix.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    let (pr, pc) = (rc.pairs[r], rc.pairs[c]);
                    rows.push(vec![
                        pr.0.to_string(),
                        pr.1.to_string(),
                        pc.0.to_string(),
                        pc.1.to_string(),
                        fmt_f64(*x),
                    ]);
                }
            }
            csv_text(&["row_j1", "row_j2", "col_j1", "col_j2", "value"], rows)?
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(0)
}

fn omega(a: &OmegaArgs, cfg: &Config) -> Result<u8> {
    check_k(a.k, cfg)?;
    check_jm(a.k, a.j, a.m)?;
    let two_nu = parse_two_nu(a.nu)?;
    let block = match omega_block(a.k, a.j, a.m, two_nu) {
        Ok(b) => b,
        Err(TransformError::EmptyBlock { .. }) => {
            return usage(format!(
                "the block K={} J={} M={} nu={} is empty",
                a.k, a.j, a.m, a.nu
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let sols = diagonalize_block(&block)?;
    let functions: Vec<Eigen> = sols
        .iter()
        .map(|f| Eigen {
            omega_index: f.label.omega_index,
            omega: f.omega,
            components: f
                .components
                .iter()
                .map(|((j1, j2), c)| Component {
                    j1: *j1,
                    j2: *j2,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        })
        .collect();
    let text = match a.format {
        Format::Json => to_json(&OmegaOut {
            k: a.k,
            j: a.j,
            m: a.m,
            two_nu,
            tags: block.tags.clone(),
            eigenvalues: functions.iter().map(|f| f.omega).collect(),
            functions,
        })?,
        Format::Csv => csv_text(
            &["omega_index", "omega", "j1", "j2", "re", "im"],
            functions.iter().flat_map(|f| {
                f.components.iter().map(move |c| {
                    vec![
                        f.omega_index.to_string(),
                        fmt_f64(f.omega),
                        c.j1.to_string(),
                        c.j2.to_string(),
                        fmt_f64(c.re),
                        fmt_f64(c.im),
                    ]
                })
            }),
        )?,
    };
    emit(&text, a.out.as_deref())?;
    Ok(0)
}

pub fn run(cmd: &Command, cfg: &Config) -> Result<u8> {
    match cmd {
        Command::Coeffs(a) => coeffs(a, cfg),
        Command::Omega(a) => omega(a, cfg),
    }
}
