//! Synthetic reaction corpus with document, author, year and class
//! structure.
//!
//! Every document works on one substrate family (an aryl skeleton with a
//! fixed decoration) and runs one or two reaction classes on it with a
//! rotating set of coupling partners. Some records repeat an earlier
//! transformation of the same document under different conditions, so
//! near-duplicates cluster inside documents the way they do in patents.

use rand::prelude::*;
use rand::seq::IndexedRandom;
use rand_chacha::ChaCha8Rng;

use rxnsplit_core::corpus::{ClassCode, RawRecord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemoParams {
    pub records: usize,
    pub seed: u64,
    pub first_year: i32,
    pub last_year: i32,
    /// Mix in duplicates, filter failures and malformed strings.
    pub noise: bool,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams { records: 5000, seed: 0, first_year: 1971, last_year: 2022, noise: true }
    }
}

/// Aryl skeletons. `{R}` takes a prefix decoration and `{X}` the reacting
/// handle; ring labels 1 and 4 are reserved here, partners use 2 and 3.
const SKELETONS: &[&str] = &[
    "{R}c1ccc({X})cc1",
    "{R}c1cccc({X})c1",
    "{R}c1ccc({X})s1",
    "{R}c1ccc4cc({X})ccc4c1",
    "{R}c1ccc({X})c(F)c1",
    "{R}c1cnc({X})nc1",
    "{R}c1ccc4[nH]c({X})cc4c1",
    "{R}C1CCN(c4ccc({X})cc4)CC1",
    "{R}c1ccc({X})cn1",
    "{R}c1cc(C)c({X})c(C)c1",
];

const DECORATIONS: &[&str] = &[
    "", "F", "Cl", "C", "CO", "N#C", "FC(F)(F)", "CC(C)(C)", "CS(=O)(=O)", "CC(=O)N", "CN(C)", "CCO",
];

/// Aryl groups written from the attachment atom.
const ARYLS: &[&str] = &[
    "c2ccccc2",
    "c2ccc(C)cc2",
    "c2ccc(OC)cc2",
    "c2ccc(F)cc2",
    "c2cccnc2",
    "c2ccsc2",
    "c2ccc3ccccc3c2",
    "c2ccc(C(F)(F)F)cc2",
    "c2cccc(Cl)c2",
    "c2ccoc2",
    "c2ccc(C(C)=O)cc2",
    "c2cc(C)cc(C)c2",
];

/// Amines written from the nitrogen; each is also a valid molecule alone.
const AMINES: &[&str] = &[
    "N2CCOCC2",
    "N2CCCC2",
    "N2CCCCC2",
    "N2CCN(C)CC2",
    "NCc2ccccc2",
    "NC2CCCCC2",
    "N(C)C",
    "NCC",
    "Nc2ccccc2",
    "N2CCC(C(=O)OCC)CC2",
    "N2CC[C@@H](O)C2",
    "N[C@@H](C)c2ccccc2",
];

/// (alkene, linear product linker, branched product linker)
const ALKENES: &[(&str, &str, &str)] = &[
    ("C=CC(=O)OC", "/C=C/C(=O)OC", "C(=C)C(=O)OC"),
    ("C=CC(=O)OCC", "/C=C/C(=O)OCC", "C(=C)C(=O)OCC"),
    ("C=Cc2ccccc2", "/C=C/c2ccccc2", "C(=C)c2ccccc2"),
    ("C=CC#N", "/C=C/C#N", "C(=C)C#N"),
    ("C=CC(=O)OC(C)(C)C", "/C=C/C(=O)OC(C)(C)C", "C(=C)C(=O)OC(C)(C)C"),
];

/// (Grignard reagent, transferred group)
const GRIGNARDS: &[(&str, &str)] = &[
    ("C[Mg]Br", "C"),
    ("CC[Mg]Br", "CC"),
    ("Br[Mg]c2ccccc2", "c2ccccc2"),
    ("CC(C)[Mg]Br", "C(C)C"),
    ("C=CC[Mg]Br", "CC=C"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    SuzukiBromo,
    SuzukiChloro,
    SuzukiIodo,
    SuzukiTriflate,
    Heck,
    BuchwaldBromo,
    BuchwaldChloro,
    Amide,
    GrignardEster,
    NitroReduction,
    EsterHydrolysis,
    AldehydeReduction,
}

impl Kind {
    const ALL: [Kind; 12] = [
        Kind::SuzukiBromo,
        Kind::SuzukiChloro,
        Kind::SuzukiIodo,
        Kind::SuzukiTriflate,
        Kind::Heck,
        Kind::BuchwaldBromo,
        Kind::BuchwaldChloro,
        Kind::Amide,
        Kind::GrignardEster,
        Kind::NitroReduction,
        Kind::EsterHydrolysis,
        Kind::AldehydeReduction,
    ];

    fn code(self) -> &'static str {
        match self {
            Kind::SuzukiBromo => "3.1.1",
            Kind::SuzukiChloro => "3.1.2",
            Kind::SuzukiIodo => "3.1.3",
            Kind::SuzukiTriflate => "3.1.4",
            Kind::Heck => "3.2.1",
            Kind::BuchwaldBromo => "1.3.1",
            Kind::BuchwaldChloro => "1.3.2",
            Kind::Amide => "2.1.1",
            Kind::GrignardEster => "3.7.14",
            Kind::NitroReduction => "7.1.1",
            Kind::EsterHydrolysis => "6.2.1",
            Kind::AldehydeReduction => "0.0",
        }
    }

    /// Relative frequency among document themes.
    fn weight(self) -> u32 {
        match self {
            Kind::SuzukiBromo => 6,
            Kind::Amide => 8,
            Kind::Heck | Kind::BuchwaldBromo | Kind::GrignardEster | Kind::NitroReduction => 3,
            Kind::EsterHydrolysis => 4,
            _ => 2,
        }
    }

    /// First year the class appears; amination arrives mid-horizon.
    fn since(self) -> i32 {
        match self {
            Kind::BuchwaldBromo | Kind::BuchwaldChloro => 1995,
            Kind::SuzukiBromo | Kind::SuzukiIodo => 1981,
            Kind::SuzukiChloro | Kind::SuzukiTriflate => 1990,
            _ => i32::MIN,
        }
    }

    fn conditions(self) -> &'static [&'static str] {
        match self {
            Kind::SuzukiBromo | Kind::SuzukiChloro | Kind::SuzukiIodo | Kind::SuzukiTriflate => &[
                "[Pd].O=C([O-])[O-].[K+].[K+].C1COCCO1.O",
                "[Pd].O=P([O-])([O-])[O-].[K+].[K+].[K+].C1CCOC1.O",
                "[Pd].O=C([O-])[O-].[Cs+].[Cs+].CN(C)C=O",
                "[Pd].O=C([O-])[O-].[Na+].[Na+].CCO.O",
            ],
            Kind::Heck => &["[Pd].CCN(CC)CC.CN(C)C=O", "[Pd].O=C([O-])[O-].[K+].[K+].CC#N", "[Pd].CCN(CC)CC.CC#N"],
            Kind::BuchwaldBromo | Kind::BuchwaldChloro => &[
                "[Pd].CC(C)(C)[O-].[Na+].C1COCCO1",
                "[Pd].O=C([O-])[O-].[Cs+].[Cs+].C1COCCO1",
                "[Pd].CC(C)(C)[O-].[K+].C1CCOC1",
            ],
            Kind::Amide => &[
                "CCN(C(C)C)C(C)C.CN(C)C=O",
                "CCN(CC)CC.ClCCl",
                "CCN(C(C)C)C(C)C.ClCCl",
                "CCN(CC)CC.CN(C)C=O",
            ],
            Kind::GrignardEster => &["C1CCOC1", "CCOCC", "C1CCOC1.CCOCC"],
            Kind::NitroReduction => &["[H][H].[Pd].CO", "[Fe].Cl.CCO", "[H][H].[Pd].CCO"],
            Kind::EsterHydrolysis => &["[Li+].[OH-].C1CCOC1.O", "[Na+].[OH-].CO.O", "[K+].[OH-].CCO.O"],
            Kind::AldehydeReduction => &["[BH4-].[Na+].CO", "[BH4-].[Na+].CCO", "[AlH4-].[Li+].C1CCOC1"],
        }
    }
}

/// One substrate family: skeleton plus decoration.
#[derive(Clone, Copy, Debug)]
struct Family {
    skeleton: &'static str,
    decoration: &'static str,
}

impl Family {
    fn with(&self, handle: &str) -> String {
        self.skeleton.replace("{R}", self.decoration).replace("{X}", handle)
    }
}

/// Reactant and product strings of one transformation.
fn transform(kind: Kind, fam: &Family, partner: usize, rng: &mut ChaCha8Rng) -> (String, String) {
    let aryl = ARYLS[partner % ARYLS.len()];
    let amine = AMINES[partner % AMINES.len()];
    let suzuki = |handle: &str| (format!("{}.OB(O){aryl}", fam.with(handle)), fam.with(&format!("-{aryl}")));
    // Kinds without a coupling partner vary an aryl prefix instead.
    let pre = |handle: &str| {
        let deco = format!("{}{}", fam.decoration, ARYLS[partner / GRIGNARDS.len() % ARYLS.len()]);
        fam.skeleton.replace("{R}", &deco).replace("{X}", handle)
    };
    match kind {
        Kind::SuzukiBromo => suzuki("Br"),
        Kind::SuzukiChloro => suzuki("Cl"),
        Kind::SuzukiIodo => suzuki("I"),
        Kind::SuzukiTriflate => suzuki("OS(=O)(=O)C(F)(F)F"),
        Kind::Heck => {
            let (alkene, linear, branched) = ALKENES[partner % ALKENES.len()];
            // A minority of entries record the branched regioisomer.
            let linker = if rng.random_bool(0.15) { branched } else { linear };
            (format!("{}.{alkene}", fam.with("Br")), fam.with(linker))
        }
        Kind::BuchwaldBromo => (format!("{}.{amine}", fam.with("Br")), fam.with(amine)),
        Kind::BuchwaldChloro => (format!("{}.{amine}", fam.with("Cl")), fam.with(amine)),
        Kind::Amide => (format!("{}.{amine}", fam.with("C(=O)O")), fam.with(&format!("C(=O){amine}"))),
        Kind::GrignardEster => {
            let (reagent, group) = GRIGNARDS[partner % GRIGNARDS.len()];
            let product = if rng.random_bool(0.6) {
                pre(&format!("C({group})({group})O"))
            } else {
                pre(&format!("C(=O){group}"))
            };
            (format!("{}.{reagent}", pre("C(=O)OC")), product)
        }
        Kind::NitroReduction => (pre("[N+](=O)[O-]"), pre("N")),
        Kind::EsterHydrolysis => (pre("C(=O)OC"), pre("C(=O)O")),
        Kind::AldehydeReduction => (pre("C=O"), pre("CO")),
    }
}

/// A research group; documents draw their teams from one lab, with the
/// occasional outside collaborator.
struct Lab {
    members: Vec<usize>,
    start: i32,
    end: i32,
}

struct Authors {
    names: usize,
    labs: Vec<Lab>,
}

impl Authors {
    fn new_author(&mut self) -> usize {
        self.names += 1;
        self.names - 1
    }

    fn lab(&mut self, year: i32, rng: &mut ChaCha8Rng) -> usize {
        let active: Vec<usize> = (0..self.labs.len())
            .filter(|&i| self.labs[i].start <= year && year <= self.labs[i].end)
            .collect();
        if !active.is_empty() && rng.random_bool(0.75) {
            return *active.choose(rng).unwrap();
        }
        let life = rng.random_range(3..=25);
        let start = year - rng.random_range(0..=life / 2);
        let members = (0..rng.random_range(2..=4)).map(|_| self.new_author()).collect();
        self.labs.push(Lab { members, start, end: start + life });
        self.labs.len() - 1
    }

    fn team(&mut self, year: i32, rng: &mut ChaCha8Rng) -> Vec<String> {
        let lab = self.lab(year, rng);
        let size = rng.random_range(1..=4usize);
        let mut team: Vec<usize> = Vec::new();
        for _ in 0..size {
            let pick = if rng.random_bool(0.2) {
                let a = self.new_author();
                self.labs[lab].members.push(a);
                a
            } else {
                *self.labs[lab].members.choose(rng).unwrap()
            };
            if !team.contains(&pick) {
                team.push(pick);
            }
        }
        if rng.random_bool(0.03) {
            let other = rng.random_range(0..self.labs.len());
            let a = *self.labs[other].members.choose(rng).unwrap();
            if !team.contains(&a) {
                team.push(a);
            }
        }
        team.into_iter().map(|i| format!("author{i:04}")).collect()
    }
}

fn pick_year(first: i32, last: i32, doc: usize, rng: &mut ChaCha8Rng) -> i32 {
    let span = (last - first + 1) as usize;
    if doc < span * 2 {
        // Every year is covered twice before the growth curve takes over.
        return first + (doc % span) as i32;
    }
    let weights: Vec<f64> = (0..span).map(|i| 1.0 + 0.12 * i as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return first + i as i32;
        }
        x -= w;
    }
    last
}

fn pick_kind(year: i32, rng: &mut ChaCha8Rng) -> Kind {
    let open: Vec<Kind> = Kind::ALL.into_iter().filter(|k| k.since() <= year).collect();
    *open.choose_weighted(rng, |k| k.weight()).unwrap()
}

/// Records that the cleaning stages should remove.
const FILTER_FAILURES: &[&str] = &[
    "CCO>>CC=O",
    "[Na+].[Cl-].O.O.O>>[Na+].[Cl-].O",
    "CC.CC.CC>>CCCCCC",
    "CC(=O)[O-].[Na+]>>CC(=O)O.[Na+]",
    "CCCCCCO>>CCCCCCO.[H][H]",
];
const MALFORMED: &[&str] = &["c1ccccc1Br.OB(O)c1ccccc>>c1ccccc1", "CCCCO>CC>C=O>C", "C1CCCCC1N(>>C1CCCCC1"];

/// Deterministic synthetic corpus of `params.records` raw records.
pub fn demo_corpus(params: &DemoParams) -> Vec<RawRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut authors = Authors { names: 0, labs: Vec::new() };
    let mut out: Vec<RawRecord> = Vec::with_capacity(params.records);
    let mut doc = 0usize;
    while out.len() < params.records {
        let year = pick_year(params.first_year, params.last_year, doc, &mut rng);
        let doc_id = format!("doc{doc:05}");
        let team = authors.team(year, &mut rng);
        let skeleton = *SKELETONS.choose(&mut rng).unwrap();
        let deco_base = rng.random_range(0..DECORATIONS.len());
        let mut kinds = vec![pick_kind(year, &mut rng)];
        if rng.random_bool(0.3) {
            kinds.push(pick_kind(year, &mut rng));
        }
        let partner_base = rng.random_range(0..64usize);
        let size = 1 + (rng.random::<f64>().powi(2) * 30.0) as usize;
        let mut made: Vec<(Kind, String, String, usize)> = Vec::new();
        for _ in 0..size {
            if out.len() >= params.records {
                break;
            }
            let id = format!("rxn{:06}", out.len());
            if params.noise && rng.random_bool(0.03) {
                out.push(noise_record(id, &doc_id, &team, year, &out, &mut rng));
                continue;
            }
            // Repeat an earlier transformation under new conditions.
            let repeat = made
                .iter()
                .filter(|m| m.3 + 1 < m.0.conditions().len())
                .count()
                > 0
                && rng.random_bool(0.3);
            let (kind, reactants, product, cond) = if repeat {
                let options: Vec<usize> =
                    (0..made.len()).filter(|&i| made[i].3 + 1 < made[i].0.conditions().len()).collect();
                let i = *options.choose(&mut rng).unwrap();
                made[i].3 += 1;
                let m = &made[i];
                (m.0, m.1.clone(), m.2.clone(), m.3)
            } else {
                // A document explores a small window of decorations and
                // partners; redraw a few times to avoid exact repeats.
                let mut draw = || {
                    let kind = *kinds.choose(&mut rng).unwrap();
                    let fam = Family {
                        skeleton,
                        decoration: DECORATIONS[(deco_base + rng.random_range(0..3usize)) % DECORATIONS.len()],
                    };
                    let partner = partner_base + rng.random_range(0..8usize);
                    let (r, p) = transform(kind, &fam, partner, &mut rng);
                    (kind, r, p)
                };
                let mut pick = draw();
                for _ in 0..8 {
                    if !made.iter().any(|m| m.1 == pick.1 && m.2 == pick.2) {
                        break;
                    }
                    pick = draw();
                }
                let (kind, r, p) = pick;
                let cond = rng.random_range(0..kind.conditions().len());
                made.push((kind, r.clone(), p.clone(), cond));
                (kind, r, p, cond)
            };
            let class = if rng.random_bool(0.05) { None } else { ClassCode::parse(kind.code()).ok() };
            out.push(RawRecord {
                id,
                rxn: format!("{reactants}>{}>{product}", kind.conditions()[cond]),
                doc: doc_id.clone(),
                authors: team.clone(),
                year,
                class,
            });
        }
        doc += 1;
    }
    out
}

fn noise_record(id: String, doc: &str, team: &[String], year: i32, earlier: &[RawRecord], rng: &mut ChaCha8Rng) -> RawRecord {
    let roll = rng.random_range(0..10);
    let (rxn, class) = if roll < 6 && !earlier.is_empty() {
        // Cross-document duplicate with its own tag and year.
        let src = &earlier[rng.random_range(0..earlier.len())];
        let class = if rng.random_bool(0.5) { src.class.clone() } else { None };
        (src.rxn.clone(), class)
    } else if roll < 9 {
        (FILTER_FAILURES.choose(rng).unwrap().to_string(), None)
    } else {
        (MALFORMED.choose(rng).unwrap().to_string(), None)
    };
    RawRecord { id, rxn, doc: doc.to_string(), authors: team.to_vec(), year, class }
}
