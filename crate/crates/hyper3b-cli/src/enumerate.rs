use crate::config::Config;
use crate::output::{csv_text, emit, fmt_f64, to_json, usage, Format};
use anyhow::Result;
use hyper3b::basis::{block_dimension, degeneracy, degeneracy_total, harmonic_dimension};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Hyperspherical degree K.
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: i32,
    /// Keep only labels with this N eigenvalue (a multiple of 1/2).
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Keep only labels with this total angular momentum.
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: Option<i32>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Label {
    k: i32,
    j: i32,
    m: i32,
    two_nu: i32,
    nu: f64,
    omega_index: i64,
    block_dimension: i64,
}

#[derive(Debug, Serialize)]
struct Block {
    j: i32,
    dimension: i64,
}

#[derive(Debug, Serialize)]
struct Sector {
    two_nu: i32,
    nu: f64,
    degeneracy: i64,
    blocks: Vec<Block>,
}

#[derive(Debug, Serialize)]
struct Listing {
    k: i32,
    degeneracy_total: i64,
    harmonic_dimension: i64,
    sectors: Vec<Sector>,
    count: usize,
    labels: Vec<Label>,
}

/// Parses `ν` into `2ν`, requiring a multiple of 1/2.
pub fn parse_two_nu(nu: f64) -> Result<i32> {
    let t = 2.0 * nu;
    if !t.is_finite() || (t - t.round()).abs() > 1e-9 || t.abs() > 1e6 {
        return usage(format!("nu must be a multiple of 1/2, got {nu}"));
    }
    Ok(t.round() as i32)
}

pub fn check_k(k: i32, cfg: &Config) -> Result<()> {
    if k < 0 || k > cfg.k_limit() {
        return usage(format!("K must lie in 0..={}, got {k}", cfg.k_limit()));
    }
    Ok(())
}

pub fn run(args: &Args, cfg: &Config) -> Result<u8> {
    let k = args.k;
    check_k(k, cfg)?;
    let nu_filter = match args.nu {
        Some(nu) => {
            let t = parse_two_nu(nu)?;
            if degeneracy(k, t) == 0 {
                return usage(format!("nu = {nu} does not occur at K = {k}"));
            }
            Some(t)
        }
        None => None,
    };
    if let Some(j) = args.j {
        if j < 0 || j > k {
            return usage(format!("J must lie in 0..={k}, got {j}"));
        }
    }
    let mut sectors = Vec::new();
    let mut labels = Vec::new();
    for two_nu in (-k..=k).step_by(2) {
        if nu_filter.is_some_and(|t| t != two_nu) {
            continue;
        }
        let nu = f64::from(two_nu) / 2.0;
        let blocks: Vec<Block> = (0..=k)
            .map(|j| Block {
                j,
                dimension: block_dimension(k, j, two_nu),
            })
            .filter(|b| b.dimension > 0)
            .collect();
        for b in &blocks {
            if args.j.is_some_and(|j| j != b.j) {
                continue;
            }
            for m in -b.j..=b.j {
                for omega_index in 0..b.dimension {
                    labels.push(Label {
                        k,
                        j: b.j,
                        m,
                        two_nu,
                        nu,
                        omega_index,
                        block_dimension: b.dimension,
                    });
                }
            }
        }
        sectors.push(Sector {
            two_nu,
            nu,
            degeneracy: degeneracy(k, two_nu),
            blocks,
        });
    }
    let text = match args.format {
        Format::Json => to_json(&Listing {
            k,
            degeneracy_total: degeneracy_total(k),
            harmonic_dimension: harmonic_dimension(k),
            sectors,
            count: labels.len(),
            labels,
        })?,
        Format::Csv => csv_text(
            &[
                "k",
                "j",
                "m",
                "two_nu",
                "nu",
                "omega_index",
                "block_dimension",
            ],
            labels.iter().map(|l| {
                vec![
                    l.k.to_string(),
                    l.j.to_string(),
                    l.m.to_string(),
                    l.two_nu.to_string(),
                    fmt_f64(l.nu),
                    l.omega_index.to_string(),
                    l.block_dimension.to_string(),
                ]
            }),
        )?,
    };
    emit(&text, args.out.as_deref())?;
    Ok(0)
}
