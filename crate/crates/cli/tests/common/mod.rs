#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = samksepa_cli::run_with_output(std::iter::once("samksepa").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

pub fn run_ok(args: &[&str]) -> String {
    let (code, out) = run(args);
    assert_eq!(code, 0, "samksepa {args:?} failed: {out}");
    out
}

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// A two-source corpus with a journal file and a config pointing at it.
/// Returns the config path.
pub fn write_corpus(dir: &Path) -> PathBuf {
    let w = |rel: &str, s: &str| {
        let path = dir.join(rel);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, s).unwrap();
    };
    w(
        "raw/mkb/a.txt",
        "रामः वनं गच्छति। सः इत्युच्यते!\n\nनास्ति किमपि । वस्तु अस्ति ।\n\n\n\nकिञ्चेति पृच्छति । तथापि गच्छति ।\n",
    );
    w(
        "raw/mkb/b.txt",
        "नास्ति किमपि । अन्यः अनुच्छेदः ।\r\n\r\nतस्येदमिति वदति । द्वितीयम् वाक्यम् ?\n",
    );
    w(
        "raw/wiki/w.txt",
        "विकिपीडिया लेखः (2020) । अत्र बहवः शब्दाः ।\n\nअपरः अनुच्छेदः । अन्तिमम् ।\n",
    );
    w(
        "raw/journal.csv",
        "title,document,summary\nप्रथमः,\"लेखस्य पाठः । द्वितीयं वाक्यम् ।\",सारः ।\nद्वितीयः,पाठः ।,\nतृतीयः,अन्यः पाठः ।,अन्यः सारः ।\n",
    );
    w(
        "manifest.conf",
        "# sources\nmkb.base_id = 100000\nmkb.inputs = raw/mkb/a.txt, raw/mkb/b.txt\nwiki.base_id = 5000000\nwiki.paragraph_ids = false\nwiki.inputs = raw/wiki/w.txt\n",
    );
    w(
        "pipeline.conf",
        "manifest = manifest.conf\njournal = raw/journal.csv\njournal_base_id = 6100000\ntrain_ratio_lm = 0.9\ntrain_ratio_sum = 0.6\nseed = 42\n",
    );
    dir.join("pipeline.conf")
}

/// Every file below `dir`, keyed by relative path.
pub fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}
