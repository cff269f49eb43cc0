//! Benchmark network acquisition: manifest parsing, a checksummed download
//! cache and the size/edge-count selection check.

use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Overrides the default cache directory.
pub const CACHE_ENV: &str = "WALKBENCH_CACHE";
const DEFAULT_CACHE: &str = "cache";
const LOCK_TIMEOUT: Duration = Duration::from_secs(600);
const MAX_DOWNLOAD: u64 = 512 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetDescriptor {
    pub name: String,
    pub source_url: String,
    /// Lowercase hex SHA-256 of the edge-list bytes.
    pub expected_checksum: Option<String>,
    /// Cache-relative location, `<name>.edges`.
    pub local_path: PathBuf,
}

impl DatasetDescriptor {
    pub fn new(name: &str, source_url: &str, expected_checksum: Option<&str>) -> Self {
        DatasetDescriptor {
            name: name.to_owned(),
            source_url: source_url.to_owned(),
            expected_checksum: expected_checksum.map(|c| c.to_ascii_lowercase()),
            local_path: PathBuf::from(format!("{name}.edges")),
        }
    }
}

/// Parses `name<TAB>url<TAB>checksum` records. Blank lines and `#` comments
/// are skipped; the checksum column may be empty or absent.
pub fn parse_manifest(text: &str) -> Result<Vec<DatasetDescriptor>> {
    let mut out: Vec<DatasetDescriptor> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parse = |message: String| Error::Parse { line: i + 1, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&cols.len()) {
            return Err(parse(format!("expected 2 or 3 tab-separated fields, found {}", cols.len())));
        }
        let name = cols[0].trim();
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(parse(format!("invalid dataset name {name:?}")));
        }
        let checksum = cols.get(2).map(|c| c.trim()).filter(|c| !c.is_empty());
        if let Some(c) = checksum {
            if c.len() != 64 || !c.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(parse(format!("checksum for {name} is not a SHA-256 hex digest")));
            }
        }
        if out.iter().any(|d| d.name == name) {
            return Err(parse(format!("duplicate dataset {name:?}")));
        }
        out.push(DatasetDescriptor::new(name, cols[1].trim(), checksum));
    }
    Ok(out)
}

/// The cache directory: `$WALKBENCH_CACHE` if set, else `./cache`.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE))
}

/// Retrieves the bytes behind a URL.
pub trait Transport {
    fn get(&self, url: &str) -> std::result::Result<Vec<u8>, String>;
}

/// `http(s)://` through ureq, `file://` and bare paths from disk.
#[derive(Debug, Default, Clone, Copy)]
pub struct DefaultTransport;

impl Transport for DefaultTransport {
    fn get(&self, url: &str) -> std::result::Result<Vec<u8>, String> {
        if url.starts_with("http://") || url.starts_with("https://") {
            let mut resp = ureq::get(url).call().map_err(|e| e.to_string())?;
            resp.body_mut()
                .with_config()
                .limit(MAX_DOWNLOAD)
                .read_to_vec()
                .map_err(|e| e.to_string())
        } else {
            let path = url.strip_prefix("file://").unwrap_or(url);
            fs::read(path).map_err(|e| format!("{path}: {e}"))
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Returns the cached edge list for `desc`, downloading it on a cold cache.
pub fn fetch_remote(desc: &DatasetDescriptor, cache_dir: &Path) -> Result<PathBuf> {
    fetch_with(desc, cache_dir, &DefaultTransport)
}

/// [`fetch_remote`] over an explicit transport.
///
/// A warm cache is returned without touching the transport, after checking
/// the checksum when one is expected. A mismatching file is renamed to
/// `<name>.edges.quarantine` and the call fails.
pub fn fetch_with(desc: &DatasetDescriptor, cache_dir: &Path, transport: &dyn Transport) -> Result<PathBuf> {
    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    let target = cache_dir.join(&desc.local_path);
    let _lock = CacheLock::acquire(&cache_dir.join(format!("{}.lock", desc.name)), &desc.name)?;

    if target.is_file() {
        let bytes = fs::read(&target).map_err(|e| Error::io(&target, e))?;
        verify(desc, &bytes, &target)?;
        log::debug!("{}: cache hit at {}", desc.name, target.display());
        return Ok(target);
    }

    if desc.source_url.is_empty() {
        return Err(Error::Transport {
            name: desc.name.clone(),
            message: "no source URL and nothing cached".into(),
        });
    }
    log::info!("{}: fetching {}", desc.name, desc.source_url);
    let bytes = transport.get(&desc.source_url).map_err(|message| Error::Transport {
        name: desc.name.clone(),
        message,
    })?;
    let partial = cache_dir.join(format!("{}.edges.partial", desc.name));
    fs::write(&partial, &bytes).map_err(|e| Error::io(&partial, e))?;
    verify(desc, &bytes, &partial)?;
    fs::rename(&partial, &target).map_err(|e| Error::io(&target, e))?;
    Ok(target)
}

fn verify(desc: &DatasetDescriptor, bytes: &[u8], path: &Path) -> Result<()> {
    let Some(expected) = &desc.expected_checksum else {
        return Ok(());
    };
    let actual = sha256_hex(bytes);
    if &actual == expected {
        return Ok(());
    }
    let quarantine = path.with_file_name(format!("{}.edges.quarantine", desc.name));
    fs::rename(path, &quarantine).map_err(|e| Error::io(path, e))?;
    log::error!("{}: checksum mismatch, moved to {}", desc.name, quarantine.display());
    Err(Error::ChecksumMismatch {
        name: desc.name.clone(),
        expected: expected.clone(),
        actual,
        quarantine,
    })
}

/// Exclusive per-dataset lock file, removed on drop.
struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    fn acquire(path: &Path, name: &str) -> Result<Self> {
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(path) {
                Ok(_) => return Ok(CacheLock { path: path.to_owned() }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_TIMEOUT {
                        return Err(Error::Transport {
                            name: name.to_owned(),
                            message: format!("cache lock {} held too long", path.display()),
                        });
                    }
                    thread::sleep(Duration::from_millis(25));
                }
                Err(e) => return Err(Error::io(path, e)),
            }
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Opens a graph reference: an existing file path, or a manifest name
/// resolved through the cache.
pub fn open_dataset(reference: &str, manifest: &[DatasetDescriptor], cache_dir: &Path) -> Result<File> {
    let direct = Path::new(reference);
    let path = if direct.is_file() {
        direct.to_owned()
    } else if let Some(desc) = manifest.iter().find(|d| d.name == reference) {
        fetch_remote(desc, cache_dir)?
    } else {
        return Err(Error::Config(format!("graph {reference:?} is neither a file nor a manifest entry")));
    };
    File::open(&path).map_err(|e| Error::io(&path, e))
}

pub const MIN_NODES: usize = 150;
pub const MAX_NODES: usize = 5000;
/// Share of edges held out by the default split.
pub const SELECTION_SPLIT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionReport {
    pub passed: bool,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
}

/// Checks the benchmark selection rules. A node count outside
/// [`MIN_NODES`, `MAX_NODES`] is only a warning; a graph that would hold out
/// no edges, or is not simple, fails.
pub fn validate_selection(g: &Graph) -> SelectionReport {
    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    let n = g.node_count();
    if !(MIN_NODES..=MAX_NODES).contains(&n) {
        warnings.push(format!("{n} nodes is outside the {MIN_NODES}..={MAX_NODES} selection range"));
    }
    if !g.is_well_formed() {
        failures.push("graph is not a simple undirected graph".to_owned());
    }
    let held_out = (SELECTION_SPLIT * g.edge_count() as f64).floor() as usize;
    if held_out < 1 {
        failures.push(format!("{} edges leave nothing to predict", g.edge_count()));
    }
    SelectionReport {
        passed: failures.is_empty(),
        warnings,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    struct Counting {
        calls: Cell<usize>,
        body: Result2,
    }
    type Result2 = std::result::Result<Vec<u8>, String>;

    impl Transport for Counting {
        fn get(&self, _url: &str) -> Result2 {
            self.calls.set(self.calls.get() + 1);
            self.body.clone()
        }
    }

    fn counting(body: Result2) -> Counting {
        Counting { calls: Cell::new(0), body }
    }

    const BODY: &[u8] = b"a b\nb c\n";

    #[test]
    fn manifest_parsing() {
        let sum = sha256_hex(BODY);
        let text = format!("# comment\nalpha\thttps://x/a\t{sum}\nbeta\thttps://x/b\t\n\ngamma\tfile:///tmp/g\n");
        let m = parse_manifest(&text).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].expected_checksum.as_deref(), Some(sum.as_str()));
        assert_eq!(m[1].expected_checksum, None);
        assert_eq!(m[2].local_path, PathBuf::from("gamma.edges"));
        assert!(parse_manifest("a\tu\na\tv\n").is_err());
        assert!(parse_manifest("a\tu\tnot-a-digest\n").is_err());
        assert!(matches!(parse_manifest("lonely\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn cold_then_warm_cache() {
        let dir = tempfile::tempdir().unwrap();
        let t = counting(Ok(BODY.to_vec()));
        let desc = DatasetDescriptor::new("toy", "https://example.invalid/toy", Some(&sha256_hex(BODY)));
        let p1 = fetch_with(&desc, dir.path(), &t).unwrap();
        assert_eq!(t.calls.get(), 1);
        let p2 = fetch_with(&desc, dir.path(), &t).unwrap();
        assert_eq!(t.calls.get(), 1, "warm cache must not hit the network");
        assert_eq!(p1, p2);
        assert_eq!(fs::read(&p2).unwrap(), BODY);
        assert!(!dir.path().join("toy.lock").exists());
    }

    #[test]
    fn checksum_mismatch_quarantines() {
        let dir = tempfile::tempdir().unwrap();
        let t = counting(Ok(b"x y\n".to_vec()));
        let desc = DatasetDescriptor::new("bad", "https://example.invalid/bad", Some(&sha256_hex(BODY)));
        match fetch_with(&desc, dir.path(), &t) {
            Err(Error::ChecksumMismatch { quarantine, .. }) => assert!(quarantine.is_file()),
            other => panic!("{other:?}"),
        }
        assert!(!dir.path().join("bad.edges").exists());

        // A corrupted warm cache is caught on read as well.
        fs::write(dir.path().join("bad.edges"), b"tampered").unwrap();
        let err = fetch_with(&desc, dir.path(), &t).unwrap_err();
        assert!(matches!(err, Error::ChecksumMismatch { .. }));
        assert!(!err.is_retryable());
        assert_eq!(t.calls.get(), 1);
    }

    #[test]
    fn transport_errors_name_the_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let t = counting(Err("connection refused".into()));
        let err = fetch_with(&DatasetDescriptor::new("gone", "https://example.invalid", None), dir.path(), &t)
            .unwrap_err();
        assert!(err.is_retryable());
        assert!(err.to_string().contains("gone"), "{err}");
        let err = fetch_with(&DatasetDescriptor::new("nourl", "", None), dir.path(), &t).unwrap_err();
        assert!(matches!(err, Error::Transport { ref name, .. } if name == "nourl"));
    }

    #[test]
    fn file_urls() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("src.txt");
        fs::write(&src, BODY).unwrap();
        let desc = DatasetDescriptor::new("local", &format!("file://{}", src.display()), None);
        let p = fetch_remote(&desc, &dir.path().join("cache")).unwrap();
        assert_eq!(fs::read(p).unwrap(), BODY);
    }

    #[test]
    fn selection_rules() {
        let ring = |n: usize| Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)));
        let small = validate_selection(&ring(124));
        assert!(small.passed);
        assert_eq!(small.warnings.len(), 1);
        let tiny = validate_selection(&Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]));
        assert!(!tiny.passed);
        let big = validate_selection(&ring(3787));
        assert!(big.passed && big.warnings.is_empty());
    }
}
