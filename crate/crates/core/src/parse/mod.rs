//! Lexing, parsing and canonical formatting of `.rsl` source text.

mod format;
mod lexer;
mod parser;

pub use format::format;
pub use lexer::{tokenize, Token, TokenKind, KEYWORDS};
pub use parser::{parse, ParseResult};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Code;
    use crate::model::*;

    #[test]
    fn empty_package_parses_and_formats() {
        let result = parse("Package p {}", "t.rsl");
        assert!(result.diagnostics.is_empty());
        let model = result.model.unwrap();
        assert_eq!(model.package_name.to_string(), "p");
        assert!(model.elements.is_empty());
        assert_eq!(format(&model), "Package p {\n}\n");
    }

    #[test]
    fn unknown_vocabulary_literal_names_allowed_set() {
        let result = parse("Package p { Actor a : Pilot }", "t.rsl");
        assert_eq!(result.diagnostics.len(), 1);
        let d = &result.diagnostics[0];
        assert_eq!(d.code, Code::P012);
        for member in ["User", "ExternalSystem", "Timer", "Other"] {
            assert!(d.message.contains(member), "missing {member} in: {}", d.message);
        }
        assert_eq!(result.model.unwrap().elements.len(), 0);
    }

    #[test]
    fn elements_carry_declaration_spans() {
        let src = "Package p {\n    Actor a_User \"User\" : User\n}\n";
        let model = parse(src, "t.rsl").model.unwrap();
        let span = model.elements[0].span.clone().unwrap();
        assert_eq!(span.start_line, 2);
        assert_eq!(span.start_col, 5);
    }

    #[test]
    fn recovery_resumes_at_next_element() {
        let src = "Package p {\n\
                   Actor a : User\n\
                   Actor b Pilot\n\
                   Actor c : Timer\n\
                   }";
        let result = parse(src, "t.rsl");
        assert!(result.has_errors());
        let model = result.model.unwrap();
        let ids: Vec<&str> = model.elements.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "c"]);
    }

    #[test]
    fn duplicate_ids_keep_first_and_report_c001() {
        let src = "Package p { Actor a : User Actor a : Timer }";
        let result = parse(src, "t.rsl");
        assert_eq!(result.diagnostics.len(), 1);
        assert_eq!(result.diagnostics[0].code, Code::C001);
        let model = result.model.unwrap();
        assert_eq!(model.elements.len(), 1);
        assert_eq!(model.elements[0].as_actor().unwrap().kind, ActorKind::User);
    }

    #[test]
    fn full_element_round_trip() {
        let src = r#"Package org.acme.orders {
    Import itlingo.usability as u
    Actor a_Customer "Customer" : User [
        description "A person placing orders"
    ]
    DataEntity e_Order "Order" : Master [
        attribute ID : Integer constraints (PrimaryKey NotNull)
        attribute total : Decimal constraints (NotNull)
        attribute customer : Integer references e_Customer
    ]
    UseCase uc_Track "Track order" : EntityBrowse [
        actorInitiates a_Customer
        dataEntity e_Order
        scenario s_main : Main [
            step 1 : Actor "opens the order list"
            step 2 : System "shows current orders"
        ]
    ]
    UserStory us_1 [
        asA a_Customer
        iWant "to track my order"
        soThat "I know the delivery date"
        priority Must
    ]
    Goal g_1 "Retain customers" [
        priority Should
    ]
    QR qr_resp : Performance [
        metric "response time"
        value "under 2 seconds"
    ]
    TestCase tc_1 [
        traces uc_Track scenario s_main
        given "an order exists"
        when "the customer opens the order list"
        then "the order is visible"
    ]
    Term "order" : Noun [
        definition "a purchase request"
        synonym "purchase"
    ]
}
"#;
        let result = parse(src, "t.rsl");
        assert!(result.diagnostics.is_empty(), "diagnostics: {:?}", result.diagnostics);
        let model = result.model.unwrap();
        assert_eq!(model.elements.len(), 8);
        assert_eq!(model.imports.len(), 1);

        let formatted = format(&model);
        let reparsed = parse(&formatted, "t.rsl");
        assert!(reparsed.diagnostics.is_empty());
        assert!(reparsed.model.unwrap().structural_eq(&model));
        // The canonical form is a byte-level fixed point.
        assert_eq!(formatted, src);
    }

    #[test]
    fn formatter_is_idempotent_on_parsed_sources() {
        let src = "Package p { Actor x : Timer Goal g [ priority Wont ] }";
        let once = format(&parse(src, "t").model.unwrap());
        let twice = format(&parse(&once, "t").model.unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn step_order_zero_is_rejected() {
        let src = r#"Package p { UseCase u : Other [ scenario s : Main [ step 0 : Actor "x" ] ] }"#;
        let result = parse(src, "t.rsl");
        assert!(result.diagnostics.iter().any(|d| d.code == Code::P014));
    }

    #[test]
    fn qualified_references_parse() {
        let src = "Package p { UserStory us [ asA u.a_Customer iWant \"x\" ] }";
        let result = parse(src, "t.rsl");
        assert!(result.diagnostics.is_empty());
        let model = result.model.unwrap();
        assert_eq!(model.elements[0].as_user_story().unwrap().as_a.as_str(), "u.a_Customer");
    }

    #[test]
    fn missing_closing_brace_is_reported() {
        let result = parse("Package p { Actor a : User", "t.rsl");
        assert!(result.diagnostics.iter().any(|d| d.code == Code::P010));
        assert_eq!(result.model.unwrap().elements.len(), 1);
    }

    #[test]
    fn error_recovery_counts_hold_for_mixed_files() {
        // Three malformed elements out of six: exactly three parse, at
        // least three diagnostics come back.
        let src = "Package p {\n\
            Actor ok1 : User\n\
            Actor bad1 Pilot\n\
            DataEntity ok2 : Master []\n\
            UseCase bad2 : Nope []\n\
            Goal ok3\n\
            Whatever bad3 : Thing\n\
            }";
        let result = parse(src, "t.rsl");
        let model = result.model.unwrap();
        assert_eq!(model.elements.len(), 3);
        assert!(result.diagnostics.len() >= 3);
    }
}
