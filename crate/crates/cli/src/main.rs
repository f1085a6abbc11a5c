mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

// Keeps large freed blocks for reuse; with the system allocator every
// 128^3 spectrum buffer is a fresh mapping that page-faults on first touch.
#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

const EXIT_NUMERIC: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<fsr3d::Error>() {
        Some(e) if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, manifest_path) = match &cli.command {
        Command::Phantom(a) => (commands::phantom(a).map(|m| (m, true)), &a.common.manifest),
        Command::Degrade(a) => (
            commands::degrade_cmd(a).map(|m| (m, true)),
            &a.common.manifest,
        ),
        Command::Tikhonov(a) => (commands::tikhonov(a).map(|m| (m, true)), &a.common.manifest),
        Command::Tv(a) => (commands::tv(a).map(|m| (m, true)), &a.common.manifest),
        Command::Psnr(a) => (commands::psnr_cmd(a).map(|m| (m, true)), &a.common.manifest),
        Command::Bench(a) => (commands::bench(a).map(|m| (m, true)), &a.common.manifest),
        Command::Selftest(a) => (commands::selftest(a), &a.common.manifest),
        Command::Slice(a) => (commands::slice(a).map(|m| (m, true)), &a.common.manifest),
    };
    let outcome = result.and_then(|(m, ok)| {
        m.emit(manifest_path.as_deref())?;
        Ok(ok)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERIC),
        Err(err) => {
            eprintln!("fsr3d: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
