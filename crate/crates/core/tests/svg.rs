mod common;

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::DirectionSource;
use fairvec::lexicons;
use fairvec::report::{word_report, WordReportOptions};
use fairvec::viz;

const TOY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt");

fn check_svg(text: &str) {
    let doc = roxmltree::Document::parse(text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.tag_name().namespace(), Some("http://www.w3.org/2000/svg"));
    assert_eq!(root.attribute("version"), Some("1.1"));
    assert!(root.attribute("viewBox").is_some());
    for node in doc.descendants().filter(|n| n.is_element()) {
        for attr in node.attributes() {
            if ["x", "y", "cx", "cy", "width", "height", "font-size"].contains(&attr.name()) {
                let v: f64 = attr
                    .value()
                    .parse()
                    .unwrap_or_else(|_| panic!("{}={}", attr.name(), attr.value()));
                assert!(v.is_finite());
            }
        }
    }
}

#[test]
fn every_emitter_writes_wellformed_svg() {
    let e = Embedding::load(TOY, Format::Text).unwrap().normalize().unwrap();
    let g = DirectionSource::PcaPairs {
        pairs: lexicons::definitional_pairs(),
    }
    .build(&e)
    .unwrap();
    let words = ["nurse", "doctor", "engineer", "homemaker", "she & he <test>"];
    let cloud = [("nurse", 3.0), ("<doctor>", 1.0), ("\"quoted\"", 0.5)];
    for svg in [
        viz::neighbor_scatter_svg(&e, &g, "nurse", 10).unwrap(),
        viz::bias_bar_svg(&e, &g, &words).unwrap(),
        viz::pca_scatter_svg(&e, &words, &g).unwrap(),
        viz::word_cloud_svg(&cloud).unwrap(),
    ] {
        check_svg(&svg);
    }
}

#[test]
fn report_attachments_are_wellformed_and_stable() {
    let e = Embedding::load(TOY, Format::Text).unwrap().normalize().unwrap();
    let g = DirectionSource::PcaPairs {
        pairs: lexicons::definitional_pairs(),
    }
    .build(&e)
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let doc = word_report(&e, &g, "nurse", &WordReportOptions::default(), Some(dir.path())).unwrap();
    assert_eq!(doc.attachments.len(), 2);
    let first: Vec<String> = doc
        .attachments
        .iter()
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect();
    for text in &first {
        check_svg(text);
    }
    let again = word_report(&e, &g, "nurse", &WordReportOptions::default(), Some(dir.path())).unwrap();
    let second: Vec<String> = again
        .attachments
        .iter()
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect();
    assert_eq!(first, second);
}
