//! Inputs for the throughput benchmarks under `benches/`.

/// Word list mixing plain words with forms the shipped sandhi rules split.
const WORDS: [&str; 12] = [
    "रामः", "वनम्", "गच्छति", "इत्युच्यते", "नैव", "तथैव", "अस्ति", "चेति", "ग्रामे", "नास्ति", "जलम्", "पिबति",
];

/// `sentences` danda-terminated sentences of 4 to 9 words, the same text for
/// the same arguments.
pub fn synthetic_text(sentences: usize) -> String {
    let mut s = String::new();
    let mut k = 0usize;
    for i in 0..sentences {
        for _ in 0..4 + i % 6 {
            s.push_str(WORDS[k % WORDS.len()]);
            s.push(' ');
            k = k * 7 + 3;
            k %= 1009;
        }
        s.push_str("।\u{200d} ");
    }
    s
}
