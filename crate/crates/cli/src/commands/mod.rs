pub mod basic;
pub mod fit;
pub mod sweep;

use ordered_ridge::data::SynthSpec;

use crate::args::ReplayArgs;
use crate::config::{FitConfig, LambdaConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

/// Re-execute the run a manifest describes into `--out` and compare the
/// output checksums with the recorded ones.
pub fn cmd_replay(args: &ReplayArgs) -> CliResult<()> {
    let manifest = Manifest::read(&args.manifest)?;
    let out = &args.out.out;
    let config = manifest.config.clone();
    let actual = match manifest.command.as_str() {
        "fit" => {
            let cfg: FitConfig = serde_json::from_value(config)?;
            let run = fit::execute_fit(&cfg, &fit::FitPaths::in_dir(out))?;
            if let Some(want) = &manifest.dataset {
                if want.sha256 != run.dataset.sha256 {
                    return Err(CliError::NotReproduced(format!(
                        "dataset {} changed since the manifest was written",
                        want.path
                    )));
                }
            }
            run.outputs
        }
        "synth" => {
            let spec: SynthSpec = serde_json::from_value(config)?;
            basic::execute_synth(&spec, out)?
        }
        "lambda" => {
            let cfg: LambdaConfig = serde_json::from_value(config)?;
            basic::execute_lambda(&cfg, out)?.0
        }
        other => {
            return Err(CliError::Usage(format!(
                "replay supports fit, synth and lambda manifests, not `{other}`"
            )))
        }
    };
    basic::report_replay(&manifest.command, &manifest.outputs, &actual, out)
}
