use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use samksepa_core::config::{ManifestSource, SourceManifest};
use samksepa_core::corpus::SourceSpec;
use samksepa_core::error::read_to_string;

use crate::{CliError, CliResult, InputArgs, Settings};

/// Writes `contents` to `path`, creating parent directories.
pub fn write_output(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}

pub fn read(path: &Path) -> CliResult<String> {
    Ok(read_to_string(path)?)
}

/// Resolves the sources of a stage: explicit files, then `--manifest`, then
/// the configured manifest.
pub fn sources(input: &InputArgs, settings: &Settings) -> CliResult<Vec<ManifestSource>> {
    if !input.files.is_empty() {
        return Ok(vec![ManifestSource {
            spec: SourceSpec::new(&input.source, input.base_id, !input.no_paragraph_ids),
            inputs: input.files.clone(),
        }]);
    }
    let manifest = input
        .manifest
        .as_ref()
        .or(settings.config.manifest.as_ref())
        .ok_or_else(|| CliError::Usage("no input files and no manifest given".into()))?;
    let m = SourceManifest::load(manifest)?;
    if m.sources.is_empty() {
        return Err(CliError::Usage(format!("{} lists no sources", manifest.display())));
    }
    Ok(m.sources)
}

/// Output location `<dir>/<source>/<file name>` for every input, rejecting
/// two inputs of one source that share a file name.
pub fn stage_paths(dir: &Path, src: &ManifestSource) -> CliResult<Vec<PathBuf>> {
    let mut seen = HashSet::new();
    src.inputs
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .ok_or_else(|| CliError::Usage(format!("{} is not a file", p.display())))?;
            if !seen.insert(name.to_owned()) {
                return Err(CliError::Usage(format!(
                    "source {} has two inputs named {}",
                    src.spec.name,
                    name.to_string_lossy()
                )));
            }
            Ok(dir.join(&src.spec.name).join(name))
        })
        .collect()
}

/// Writes a manifest for stage outputs, with inputs relative to `dir`.
pub fn write_manifest(dir: &Path, sources: &[(SourceSpec, Vec<PathBuf>)]) -> CliResult<PathBuf> {
    let mut s = String::new();
    for (spec, outputs) in sources {
        let rel: Vec<String> = outputs
            .iter()
            .map(|p| {
                p.strip_prefix(dir)
                    .unwrap_or(p)
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect::<Vec<_>>()
                    .join("/")
            })
            .collect();
        let _ = writeln!(s, "{}.base_id = {}", spec.name, spec.base_id);
        let _ = writeln!(s, "{}.paragraph_ids = {}", spec.name, spec.has_paragraph_ids);
        let _ = writeln!(s, "{}.inputs = {}", spec.name, rel.join(", "));
    }
    let path = dir.join("manifest.conf");
    write_output(&path, s)?;
    Ok(path)
}

/// Blank-line separated paragraphs, one per line.
pub fn join_paragraphs<S: AsRef<str>>(paras: &[S]) -> String {
    if paras.is_empty() {
        return String::new();
    }
    let mut s = paras.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("\n\n");
    s.push('\n');
    s
}

/// Reads `id<TAB>text...` rows, skipping blank lines and a header whose
/// first cell is `id`.
pub fn read_tsv_rows(path: &Path, columns: usize) -> CliResult<Vec<(usize, Vec<String>)>> {
    let text = read(path)?;
    let mut rows = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split('\t').map(str::to_string).collect();
        if std::mem::take(&mut first) && cells[0].trim().eq_ignore_ascii_case("id") {
            continue;
        }
        if cells.len() != columns {
            return Err(samksepa_core::Error::Parse {
                origin: path.display().to_string(),
                line: i + 1,
                message: format!("expected {columns} tab-separated columns, found {}", cells.len()),
            }
            .into());
        }
        rows.push((i + 1, cells));
    }
    Ok(rows)
}
