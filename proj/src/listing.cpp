#include "symwm/listing.hpp"

#include <regex>
#include <sstream>

using namespace std;

namespace symwm {
namespace {
// Splits on ", " at bracket depth zero.
vector<string> split_top(const string &s) {
    vector<string> parts;
    int depth = 0;
    string cur;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '[' || c == '(')
            ++depth;
        else if (c == ']' || c == ')')
            --depth;
        if (depth == 0 && c == ',' && i + 1 < s.size() && s[i + 1] == ' ') {
            parts.push_back(cur);
            cur.clear();
            ++i;
            continue;
        }
        cur += c;
    }
    if (!cur.empty())
        parts.push_back(cur);
    return parts;
}

string strip_brackets(const string &s, int line) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ListingSyntaxError(line, "expected a bracketed list");
    return s.substr(1, s.size() - 2);
}

Variable parse_variable(const string &s, int line) {
    size_t colon = s.find(':');
    if (s.empty() || s[0] != '?' || colon == string::npos)
        throw ListingSyntaxError(line, "bad variable '" + s + "'");
    return {s.substr(0, colon), s.substr(colon + 1)};
}

vector<Variable> parse_variables(const string &inner, int line) {
    vector<Variable> out;
    for (const auto &part : split_top(inner))
        out.push_back(parse_variable(part, line));
    return out;
}

// name(?a:t, ...) where name may itself contain brackets.
ListingAtom parse_atom(const string &s, int line) {
    int depth = 0;
    size_t open = string::npos;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '[')
            ++depth;
        else if (s[i] == ']')
            --depth;
        else if (s[i] == '(' && depth == 0) {
            open = i;
            break;
        }
    }
    if (open == string::npos || s.back() != ')')
        throw ListingSyntaxError(line, "bad atom '" + s + "'");
    ListingAtom atom;
    atom.predicate = s.substr(0, open);
    atom.args = parse_variables(s.substr(open + 1, s.size() - open - 2), line);
    return atom;
}

vector<ListingAtom> parse_atoms(const string &list, int line) {
    vector<ListingAtom> out;
    for (const auto &part : split_top(strip_brackets(list, line)))
        out.push_back(parse_atom(part, line));
    return out;
}

string vars_str(const vector<Variable> &vars) {
    vector<string> parts;
    for (const auto &v : vars)
        parts.push_back(v.str());
    return join(parts, ", ");
}

string atoms_str(const vector<ListingAtom> &atoms) {
    vector<string> parts;
    for (const auto &a : atoms)
        parts.push_back(a.str());
    return "[" + join(parts, ", ") + "]";
}

bool starts_with(const string &s, const string &prefix) {
    return s.compare(0, prefix.size(), prefix) == 0;
}

// Grammar predicates print as NOT-[[0:type].feature<=[idx_0]threshold].
PredicateRef feature_from_name(const string &name, const vector<string> &types) {
    static const regex shape(
        R"(^(NOT-)?\[\[0:([A-Za-z_][A-Za-z0-9_]*)\]\.([A-Za-z_][A-Za-z0-9_]*)<=\[idx_0\]([-+0-9.eE]+)\]$)");
    smatch m;
    if (types.size() != 1 || !regex_match(name, m, shape) || m[2] != types[0])
        return nullptr;
    FeatureThreshold ft{m[2], m[3], stod(m[4]), m[1].matched};
    PredicateRef p = Predicate::feature(ft);
    return p->name() == name ? p : p->renamed(name);
}

ListingAtom to_listing_atom(const LiftedAtom &a) {
    return {a.predicate->name(), a.args};
}

vector<ListingAtom> to_listing_atoms(const vector<LiftedAtom> &atoms) {
    vector<ListingAtom> out;
    for (const auto &a : atoms)
        out.push_back(to_listing_atom(a));
    return out;
}
}

string ListingAtom::str() const {
    return predicate + "(" + vars_str(args) + ")";
}

Listing parse_listing(const string &text) {
    Listing doc;
    vector<string> lines;
    {
        string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        doc.final_newline = cur.empty();
        if (!cur.empty())
            lines.push_back(cur);
    }
    size_t i = 0;
    auto line_no = [&] {return static_cast<int>(i) + 1;};
    if (lines.empty() || !starts_with(lines[0], "Learned") ||
        lines[0].back() != ':')
        throw ListingSyntaxError(1, "missing predicates header");
    doc.predicates_header = lines[i++];
    while (i < lines.size() && !lines[i].empty() &&
           !starts_with(lines[i], "Learned operators"))
        doc.predicate_lines.push_back(lines[i++]);
    doc.blank_lines_after_predicates = 0;
    while (i < lines.size() && lines[i].empty()) {
        ++doc.blank_lines_after_predicates;
        ++i;
    }
    if (i == lines.size() || !starts_with(lines[i], "Learned operators"))
        throw ListingSyntaxError(line_no(), "missing operators header");
    doc.operators_header = lines[i++];

    auto field = [&](const string &label) {
        string prefix = "  " + label + ": ";
        if (i >= lines.size() || !starts_with(lines[i], prefix))
            throw ListingSyntaxError(line_no(), "expected '" + label + "'");
        return lines[i++].substr(prefix.size());
    };
    while (i < lines.size()) {
        const string &head = lines[i];
        if (!starts_with(head, "STRIPS-") || head.back() != ':')
            throw ListingSyntaxError(line_no(), "expected an operator header");
        ListingOperator op;
        op.name = head.substr(7, head.size() - 8);
        ++i;
        int at = line_no();
        op.params = parse_variables(strip_brackets(field("Parameters"), at), at);
        at = line_no();
        op.preconditions = parse_atoms(field("Preconditions"), at);
        at = line_no();
        op.add_effects = parse_atoms(field("Add Effects"), at);
        at = line_no();
        op.delete_effects = parse_atoms(field("Delete Effects"), at);
        at = line_no();
        op.ignore_effects = parse_atoms(field("Ignore Effects"), at);
        at = line_no();
        ListingAtom skill = parse_atom(field("Skill"), at);
        op.skill = skill.predicate;
        op.skill_args = skill.args;
        op.blank_lines_after = 0;
        while (i < lines.size() && lines[i].empty()) {
            ++op.blank_lines_after;
            ++i;
        }
        doc.operators.push_back(move(op));
    }
    return doc;
}

string emit_listing(const Listing &doc) {
    vector<string> lines;
    lines.push_back(doc.predicates_header);
    for (const auto &p : doc.predicate_lines)
        lines.push_back(p);
    lines.insert(lines.end(), doc.blank_lines_after_predicates, "");
    lines.push_back(doc.operators_header);
    for (const auto &op : doc.operators) {
        lines.push_back("STRIPS-" + op.name + ":");
        lines.push_back("  Parameters: [" + vars_str(op.params) + "]");
        lines.push_back("  Preconditions: " + atoms_str(op.preconditions));
        lines.push_back("  Add Effects: " + atoms_str(op.add_effects));
        lines.push_back("  Delete Effects: " + atoms_str(op.delete_effects));
        lines.push_back("  Ignore Effects: " + atoms_str(op.ignore_effects));
        lines.push_back("  Skill: " + op.skill + "(" + vars_str(op.skill_args) +
                        ")");
        lines.insert(lines.end(), op.blank_lines_after, "");
    }
    string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        out += lines[i];
        if (i + 1 < lines.size() || doc.final_newline)
            out += "\n";
    }
    return out;
}

Listing make_listing(const vector<PredicateRef> &learned,
                     const vector<Operator> &operators) {
    Listing doc;
    for (const auto &p : learned)
        doc.predicate_lines.push_back(p->kind() == PredicateKind::feature
                                          ? p->name()
                                          : p->declaration());
    for (const auto &op : operators) {
        ListingOperator lo;
        lo.name = op.name;
        lo.params = op.params;
        lo.preconditions = to_listing_atoms(op.preconditions);
        lo.add_effects = to_listing_atoms(op.add_effects);
        lo.delete_effects = to_listing_atoms(op.delete_effects);
        lo.ignore_effects = to_listing_atoms(op.ignore_effects);
        lo.skill = op.skill->name;
        lo.skill_args = op.skill_args;
        doc.operators.push_back(move(lo));
    }
    if (!doc.operators.empty())
        doc.operators.back().blank_lines_after = 0;
    return doc;
}

vector<Operator> listing_operators(const Listing &doc, const DomainSpec *spec) {
    map<string, PredicateRef> preds;
    auto predicate = [&](const ListingAtom &a) {
        vector<string> types;
        for (const auto &v : a.args)
            types.push_back(v.type);
        string key = a.predicate + "(" + join(types, ",") + ")";
        auto it = preds.find(key);
        if (it != preds.end())
            return it->second;
        PredicateRef p;
        // Listings print the parameter's type, which may be narrower than
        // the declared one (Clear(?x0:grill) for Clear(?o:object)).
        for (const auto &q : spec ? spec->init_predicates : vector<PredicateRef>{}) {
            if (q->name() != a.predicate || q->arity() != types.size())
                continue;
            bool fits = true;
            for (size_t k = 0; k < types.size(); ++k)
                fits = fits && spec->types.contains(types[k]) &&
                       spec->types.is_subtype(types[k], q->arg_types()[k]);
            if (fits)
                p = q;
        }
        if (!p)
            p = feature_from_name(a.predicate, types);
        if (!p)
            p = Predicate::visual(a.predicate, types);
        preds[key] = p;
        return p;
    };
    auto lift = [&](const vector<ListingAtom> &atoms) {
        vector<LiftedAtom> out;
        for (const auto &a : atoms)
            out.push_back({predicate(a), a.args});
        return out;
    };
    vector<Operator> out;
    for (const auto &lo : doc.operators) {
        Operator op;
        op.name = lo.name;
        op.params = lo.params;
        op.preconditions = lift(lo.preconditions);
        op.add_effects = lift(lo.add_effects);
        op.delete_effects = lift(lo.delete_effects);
        op.ignore_effects = lift(lo.ignore_effects);
        for (const auto &s : spec ? spec->skills : vector<SkillRef>{})
            if (s->name == lo.skill)
                op.skill = s;
        if (!op.skill) {
            vector<string> types;
            for (const auto &v : lo.skill_args)
                types.push_back(v.type);
            op.skill = make_shared<Skill>(Skill{lo.skill, types, 0});
        }
        op.skill_args = lo.skill_args;
        out.push_back(move(op));
    }
    return out;
}
}
