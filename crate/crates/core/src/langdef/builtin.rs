//! The shipped definitions: base EasyTime and the EasyTime++ extension.

use std::collections::BTreeMap;

use super::{LanguageDef, LanguageFragment, LexRule, ModifierKind, Production, RuleGroup};

fn group(name: &str, prods: &[(&str, &str, &str)]) -> RuleGroup {
    RuleGroup::new(
        name,
        prods
            .iter()
            .map(|(lhs, rhs, key)| Production::from_words(lhs, rhs, key))
            .collect(),
    )
}

/// Base EasyTime: agents, `var` declarations, measuring places with
/// guarded `upd`/`dec` statements, line comments.
pub fn easy_time_base() -> LanguageDef {
    let lexicon = vec![
        LexRule::new("Keyword", "var|mp|agnt|manual|auto|true|upd|dec", 0),
        LexRule::new("Ip", r"[0-9]{1,3}(?:\.[0-9]{1,3}){3}", 1),
        LexRule::new("Int", "[0-9]+", 2),
        LexRule::new("Identifier", "[A-Za-z][A-Za-z0-9]*", 3),
        LexRule::new("String", r#""[^"\r\n]*""#, 4),
        LexRule::new("Operator", ":=|==|->", 5),
        LexRule::new("Separator", r"[;{}()\[\]]", 6),
        LexRule::skipped("Comment", r"//[^\r\n]*", 7),
        LexRule::skipped("Whitespace", r"[ \t\r\n]+", 8),
    ];

    let groups = [
        group("Start", &[("START", "AGENTS DECS MPS", "start")]),
        group(
            "Agents",
            &[
                ("AGENTS", "AGENT AGENTS", "agents.cons"),
                ("AGENTS", "", "agents.nil"),
                ("AGENT", "#Int manual #String ;", "agent.manual"),
                ("AGENT", "#Int auto #Ip ;", "agent.auto"),
            ],
        ),
        group(
            "Decs",
            &[("DECS", "DEC DECS", "decs.cons"), ("DECS", "", "decs.nil")],
        ),
        group("Dec", &[("DEC", "var #Identifier := #Int ;", "dec.var")]),
        group(
            "MeasuringPlaces",
            &[
                ("MPS", "MP MPS", "mps.cons"),
                ("MPS", "", "mps.nil"),
                ("MP", "mp [ #Int ] -> agnt [ #Int ] { STMTS }", "mp"),
            ],
        ),
        group(
            "Statements",
            &[
                ("STMTS", "STMT STMTS", "stmts.cons"),
                ("STMTS", "STMT", "stmts.single"),
                ("STMT", "( PRED ) -> INSTR #Identifier ;", "stmt"),
                ("INSTR", "upd", "instr.upd"),
                ("INSTR", "dec", "instr.dec"),
            ],
        ),
        group(
            "Predicates",
            &[
                ("PRED", "true", "pred.true"),
                ("PRED", "#Identifier == #Int", "pred.equals"),
            ],
        ),
    ];

    LanguageDef {
        name: "EasyTime".to_string(),
        lexicon,
        rule_groups: groups
            .into_iter()
            .map(|g| (g.name.clone(), g))
            .collect::<BTreeMap<_, _>>(),
        start_symbol: "START".to_string(),
    }
}

/// The EasyTime++ extension: category maps and dynamic variables.
///
/// Two lexicon modifiers (`,` separator and the `category`/`dynamicvar`
/// keywords) and two rule modifiers (a replacement `Dec` group and a new
/// `Categories` group).
pub fn easy_time_plus_plus_fragment() -> LanguageFragment {
    LanguageFragment::empty("EasyTime++")
        .lex(ModifierKind::Extends, LexRule::new("Separator", ",", 6))
        .lex(
            ModifierKind::Extends,
            LexRule::new("Keyword", "category|dynamicvar", 0),
        )
        .rules(
            ModifierKind::Overrides,
            group(
                "Dec",
                &[
                    ("DEC", "var #Identifier := #Int ;", "dec.plain"),
                    ("DEC", "dynamicvar #Identifier ;", "dec.dynamic"),
                    ("DEC", "var #Identifier := { CTGRS } ;", "dec.categorized"),
                ],
            ),
        )
        .rules(
            ModifierKind::Add,
            group(
                "Categories",
                &[
                    (
                        "CTGRS",
                        "( category == #Int ) -> #Int , CTGRS",
                        "ctgrs.cons",
                    ),
                    ("CTGRS", "( category == #Int ) -> #Int", "ctgrs.single"),
                ],
            ),
        )
}
