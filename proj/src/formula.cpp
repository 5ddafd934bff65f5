#include "ipc/formula.hpp"

#include <cctype>
#include <deque>
#include <mutex>
#include <sstream>

namespace ipc {

struct FormulaNode {
  Conn tag;
  std::uint32_t atom = 0;  // index into atom name table (Var only)
  const FormulaNode* left = nullptr;
  const FormulaNode* right = nullptr;
  std::uint32_t id = 0;
};

namespace {

// Global intern table. Nodes live in a deque so addresses are stable;
// equality of formulas is pointer equality.
class Store {
public:
  static Store& instance() {
    static Store store;
    return store;
  }

  const FormulaNode* atom_node(std::string_view name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = atom_ids_.find(std::string(name));
    std::uint32_t atom;
    if (it != atom_ids_.end()) {
      atom = it->second;
    } else {
      atom = static_cast<std::uint32_t>(atom_names_.size());
      atom_names_.emplace_back(name);
      atom_ids_.emplace(atom_names_.back(), atom);
    }
    return intern(Conn::Var, atom, nullptr, nullptr);
  }

  const FormulaNode* falsum_node() {
    std::lock_guard<std::mutex> lock(mu_);
    return intern(Conn::Falsum, 0, nullptr, nullptr);
  }

  const FormulaNode* binary_node(Conn tag, const FormulaNode* l, const FormulaNode* r) {
    std::lock_guard<std::mutex> lock(mu_);
    return intern(tag, 0, l, r);
  }

  const std::string& atom_name(std::uint32_t atom) const { return atom_names_[atom]; }

private:
  struct Key {
    Conn tag;
    std::uint32_t atom;
    const FormulaNode* left;
    const FormulaNode* right;
    bool operator==(const Key& o) const {
      return tag == o.tag && atom == o.atom && left == o.left && right == o.right;
    }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = static_cast<std::size_t>(k.tag);
      h = h * 1000003u + k.atom;
      h = h * 1000003u + std::hash<const void*>()(k.left);
      h = h * 1000003u + std::hash<const void*>()(k.right);
      return h;
    }
  };

  const FormulaNode* intern(Conn tag, std::uint32_t atom, const FormulaNode* l,
                            const FormulaNode* r) {
    Key key{tag, atom, l, r};
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    nodes_.push_back(FormulaNode{tag, atom, l, r, static_cast<std::uint32_t>(nodes_.size())});
    const FormulaNode* node = &nodes_.back();
    table_.emplace(key, node);
    return node;
  }

  std::mutex mu_;
  std::deque<FormulaNode> nodes_;
  std::unordered_map<Key, const FormulaNode*, KeyHash> table_;
  std::vector<std::string> atom_names_;
  std::unordered_map<std::string, std::uint32_t> atom_ids_;
};

}  // namespace

Formula Formula::var(std::string_view name) { return Formula(Store::instance().atom_node(name)); }
Formula Formula::falsum() { return Formula(Store::instance().falsum_node()); }

Formula Formula::impl(Formula lhs, Formula rhs) {
  return Formula(Store::instance().binary_node(Conn::Impl, lhs.node_, rhs.node_));
}
Formula Formula::conj(Formula lhs, Formula rhs) {
  return Formula(Store::instance().binary_node(Conn::Conj, lhs.node_, rhs.node_));
}
Formula Formula::disj(Formula lhs, Formula rhs) {
  return Formula(Store::instance().binary_node(Conn::Disj, lhs.node_, rhs.node_));
}

Conn Formula::tag() const { return node_->tag; }
const std::string& Formula::var_name() const { return Store::instance().atom_name(node_->atom); }
Formula Formula::left() const { return Formula(node_->left); }
Formula Formula::right() const { return Formula(node_->right); }
std::uint32_t Formula::id() const { return node_->id; }

bool operator<(Formula a, Formula b) { return a.id() < b.id(); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
  explicit Parser(std::string_view text, std::size_t pos = 0) : text_(text), pos_(pos) {}

  Formula parse() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

  Formula parse_prefix() { return formula(); }
  std::size_t position() const { return pos_; }

private:
  Formula formula() {
    Formula lhs = disjpart();
    skip_ws();
    if (try_token("->")) return Formula::impl(lhs, formula());
    return lhs;
  }

  Formula disjpart() {
    std::vector<Formula> parts{conjpart()};
    skip_ws();
    while (try_token("\\/")) {
      parts.push_back(conjpart());
      skip_ws();
    }
    return fold_right(Conn::Disj, parts);
  }

  Formula conjpart() {
    std::vector<Formula> parts{unit()};
    skip_ws();
    while (try_token("/\\")) {
      parts.push_back(unit());
      skip_ws();
    }
    return fold_right(Conn::Conj, parts);
  }

  Formula unit() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Formula f = formula();
      skip_ws();
      if (!try_token(")")) fail("expected ')'");
      return f;
    }
    if (c == '~') {
      ++pos_;
      return Formula::neg(unit());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'')
          ++pos_;
        else
          break;
      }
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "false") return Formula::falsum();
      return Formula::var(name);
    }
    fail("expected atom, 'false', '~' or '('");
  }

  static Formula fold_right(Conn tag, const std::vector<Formula>& parts) {
    Formula acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
      acc = tag == Conn::Disj ? Formula::disj(parts[i], acc) : Formula::conj(parts[i], acc);
    return acc;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool try_token(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) {
    std::ostringstream os;
    os << "formula syntax error at position " << pos_ << ": " << msg;
    throw ParseError(os.str(), pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Precedence levels for printing: -> is 1, \/ is 2, /\ is 3, units are 4.
int precedence(Formula f) {
  switch (f.tag()) {
    case Conn::Impl: return 1;
    case Conn::Disj: return 2;
    case Conn::Conj: return 3;
    default: return 4;
  }
}

void print_rec(Formula f, int min_prec, std::string& out) {
  int prec = precedence(f);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f.tag()) {
    case Conn::Var: out += f.var_name(); break;
    case Conn::Falsum: out += "false"; break;
    case Conn::Impl:
      print_rec(f.left(), prec + 1, out);
      out += " -> ";
      print_rec(f.right(), prec, out);
      break;
    case Conn::Disj:
      print_rec(f.left(), prec + 1, out);
      out += " \\/ ";
      print_rec(f.right(), prec, out);
      break;
    case Conn::Conj:
      print_rec(f.left(), prec + 1, out);
      out += " /\\ ";
      print_rec(f.right(), prec, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

Formula parse_formula_prefix(std::string_view text, std::size_t& pos) {
  Parser p(text, pos);
  Formula f = p.parse_prefix();
  pos = p.position();
  return f;
}

std::string print_formula(Formula f) {
  std::string out;
  print_rec(f, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Contexts

void Context::add(const std::string& name, Formula f) {
  auto it = index_.find(name);
  if (it != index_.end()) {
    if (items_[it->second].second != f)
      throw std::invalid_argument("context already binds '" + name + "' to a different formula");
    return;  // same binding, keep the original entry
  }
  index_.emplace(name, items_.size());
  items_.emplace_back(name, f);
}

std::optional<Formula> Context::lookup(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return items_[it->second].second;
}

// ---------------------------------------------------------------------------
// Structural helpers

std::vector<Formula> subformulas(Formula f) {
  std::vector<Formula> out;
  std::vector<bool> seen;
  auto visit = [&](auto&& self, Formula g) -> void {
    if (g.id() >= seen.size()) seen.resize(g.id() + 1, false);
    if (seen[g.id()]) return;
    seen[g.id()] = true;
    out.push_back(g);
    if (g.is_impl() || g.is_conj() || g.is_disj()) {
      self(self, g.left());
      self(self, g.right());
    }
  };
  visit(visit, f);
  return out;
}

Formula substitute(Formula f, std::string_view atom, Formula g) {
  switch (f.tag()) {
    case Conn::Var: return f.var_name() == atom ? g : f;
    case Conn::Falsum: return f;
    case Conn::Impl: return Formula::impl(substitute(f.left(), atom, g), substitute(f.right(), atom, g));
    case Conn::Conj: return Formula::conj(substitute(f.left(), atom, g), substitute(f.right(), atom, g));
    case Conn::Disj: return Formula::disj(substitute(f.left(), atom, g), substitute(f.right(), atom, g));
  }
  return f;
}

std::size_t formula_length(Formula f) {
  if (f.is_atom()) return 1;
  return formula_length(f.left()) + formula_length(f.right());
}

std::vector<std::string> atom_names(Formula f) {
  std::vector<std::string> out;
  auto visit = [&](auto&& self, Formula g) -> void {
    if (g.is_var()) {
      for (const auto& n : out)
        if (n == g.var_name()) return;
      out.push_back(g.var_name());
      return;
    }
    if (!g.is_atom()) {
      self(self, g.left());
      self(self, g.right());
    }
  };
  visit(visit, f);
  return out;
}

}  // namespace ipc
