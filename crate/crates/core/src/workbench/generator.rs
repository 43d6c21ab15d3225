//! Synthetic university data in the style of the LUBM family: a fixed
//! schema and an ABox with the same number of entities per university, so
//! the ABox grows exactly linearly in the number of universities.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kb::{parse_kb, KbError};

/// The default schema (see `fixtures/lstw_like.kb`).
pub const DEFAULT_TBOX: &str = include_str!("../../fixtures/lstw_like.kb");

const DEPARTMENTS: usize = 3;
const FULL_PROFESSORS: usize = 2;
const ASSISTANT_PROFESSORS: usize = 3;
const COURSES: usize = 8;
const GRADUATE_COURSES: usize = 4;
const UNDERGRADUATES: usize = 20;
const GRADUATES: usize = 6;
const RESEARCH_GROUPS: usize = 1;
const COURSES_PER_UNDERGRADUATE: usize = 4;
const COURSES_PER_GRADUATE: usize = 2;
const COURSES_PER_PROFESSOR: usize = 2;

struct Abox {
    lines: Vec<String>,
}

impl Abox {
    fn concept(&mut self, c: &str, a: &str) {
        self.lines.push(format!("{c}({a})."));
    }

    fn role(&mut self, r: &str, a: &str, b: &str) {
        self.lines.push(format!("{r}({a},{b})."));
    }
}

fn names(prefix: &str, kind: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}_{kind}{i}")).collect()
}

fn department(abox: &mut Abox, rng: &mut ChaCha8Rng, univ: &str, d: &str) {
    abox.concept("Department", d);
    abox.role("subOrganizationOf", d, univ);
    let courses = names(d, "course", COURSES);
    let grad_courses = names(d, "gcourse", GRADUATE_COURSES);
    for c in &courses {
        abox.concept("Course", c);
    }
    for c in &grad_courses {
        abox.concept("GraduateCourse", c);
    }
    let all_courses: Vec<String> = courses.iter().chain(&grad_courses).cloned().collect();
    let mut professors = Vec::new();
    for (kind, concept, n) in [
        ("fprof", "FullProfessor", FULL_PROFESSORS),
        ("aprof", "AssistantProfessor", ASSISTANT_PROFESSORS),
    ] {
        for p in names(d, kind, n) {
            abox.concept(concept, &p);
            abox.role("worksFor", &p, d);
            for c in all_courses.choose_multiple(rng, COURSES_PER_PROFESSOR) {
                abox.role("teacherOf", &p, c);
            }
            professors.push(p);
        }
    }
    abox.role("headOf", &professors[0], d);
    for s in names(d, "ugrad", UNDERGRADUATES) {
        abox.concept("UndergraduateStudent", &s);
        for c in courses.choose_multiple(rng, COURSES_PER_UNDERGRADUATE) {
            abox.role("takesCourse", &s, c);
        }
    }
    for (i, g) in names(d, "grad", GRADUATES).into_iter().enumerate() {
        abox.concept("GraduateStudent", &g);
        for c in grad_courses.choose_multiple(rng, COURSES_PER_GRADUATE) {
            abox.role("takesCourse", &g, c);
        }
        abox.role("advisor", &g, professors.choose(rng).expect("professors"));
        if i == 0 {
            // a teaching assistant
            abox.role("teacherOf", &g, courses.choose(rng).expect("courses"));
        }
    }
    for g in names(d, "group", RESEARCH_GROUPS) {
        abox.concept("ResearchGroup", &g);
    }
}

/// The ABox facts for `scale` universities, one per line, deterministic in
/// `seed`.
pub fn generate_abox(scale: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut abox = Abox { lines: Vec::new() };
    for u in 0..scale {
        let univ = format!("univ{u}");
        abox.concept("University", &univ);
        for d in 0..DEPARTMENTS {
            department(&mut abox, &mut rng, &univ, &format!("{univ}_dept{d}"));
        }
    }
    abox.lines
}

/// A KB document: `tbox_text` followed by the generated ABox. Fails if the
/// TBox does not parse or lacks a predicate the generator uses.
pub fn generate_kb_with_tbox(scale: usize, seed: u64, tbox_text: &str) -> Result<String, KbError> {
    let mut out = tbox_text.trim_end().to_string();
    out.push_str(&format!("\n\n# ABox: {scale} universities, seed {seed}\n"));
    for line in generate_abox(scale, seed) {
        out.push_str(&line);
        out.push('\n');
    }
    parse_kb(&out)?;
    Ok(out)
}

pub fn generate_kb(scale: usize, seed: u64) -> String {
    generate_kb_with_tbox(scale, seed, DEFAULT_TBOX)
        .expect("default schema covers the generated ABox")
}
