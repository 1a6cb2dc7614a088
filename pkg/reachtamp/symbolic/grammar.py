"""
Lark grammar of the supported PDDL subset: STRIPS with typing, constants
and negative preconditions. Input is lower-cased before parsing; `;`
starts a comment that runs to the end of the line.
"""

PDDL_GRAMMAR = r"""
start: domain | problem

domain: "(" "define" "(" "domain" NAME ")" _domain_section* ")"
_domain_section: requirements | types | constants | predicates | action

requirements: "(" ":requirements" REQUIREMENT* ")"
types: "(" ":types" typed_names ")"
constants: "(" ":constants" typed_names ")"
predicates: "(" ":predicates" predicate_decl* ")"
predicate_decl: "(" NAME typed_vars ")"

action: "(" ":action" NAME ":parameters" "(" typed_vars ")" precondition? effect? ")"
precondition: ":precondition" condition
effect: ":effect" condition

problem: "(" "define" "(" "problem" NAME ")" "(" ":domain" NAME ")" _problem_section* ")"
_problem_section: requirements | objects | init | goal
objects: "(" ":objects" typed_names ")"
init: "(" ":init" atom* ")"
goal: "(" ":goal" condition ")"

condition: "(" "and" _literal* ")"
         | "(" ")"
         | _literal
_literal: atom | negation
negation: "(" "not" atom ")"
atom: "(" NAME _term* ")"
_term: NAME | VARIABLE

typed_names: (NAME | type_marker)*
typed_vars: (VARIABLE | type_marker)*
type_marker: "-" NAME

REQUIREMENT: /:[a-z][a-z0-9_\-]*/
VARIABLE: /\?[a-z][a-z0-9_\-]*/
NAME: /[a-z][a-z0-9_\-]*/
COMMENT: /;[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""
