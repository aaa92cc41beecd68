#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "nuchord/algebra.hpp"
#include "nuchord/axis_terms.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/stable_element.hpp"

namespace nuchord {

/// Pointwise expression over stable elements: sums, products and the
/// involution, evaluable anywhere the leaves are. Half-plane expressions can
/// also be lowered to the axis term algebra for the C0+AP index.
class BoundaryExpr {
  enum class Op { Leaf, Fn, Const, Conj, Add, Mul };

  struct Node {
    Op op;
    std::optional<StableElement> elem;  // Leaf
    Complex value{};                    // Const
    std::function<Complex(const BoundaryPoint&)> fn;  // Fn
    std::function<Complex(Complex)> fn_at;            // Fn, interior evaluation
    std::shared_ptr<const Node> a, b;
  };

  explicit BoundaryExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 public:
  BoundaryExpr(StableElement elem)  // NOLINT: implicit by design
      : node_(std::make_shared<Node>(
            Node{Op::Leaf, std::move(elem), {}, nullptr, nullptr, nullptr, nullptr})) {}

  static BoundaryExpr constant(Complex c) {
    return BoundaryExpr(std::make_shared<Node>(
        Node{Op::Const, std::nullopt, c, nullptr, nullptr, nullptr, nullptr}));
  }

  /// Opaque boundary symbol: anything evaluable pointwise (general members of
  /// S that are not stable elements, e.g. rationals with interior poles).
  static BoundaryExpr function(std::function<Complex(const BoundaryPoint&)> fn,
                               std::function<Complex(Complex)> fn_at = nullptr) {
    return BoundaryExpr(std::make_shared<Node>(
        Node{Op::Fn, std::nullopt, {}, std::move(fn), std::move(fn_at), nullptr, nullptr}));
  }

  friend BoundaryExpr conj(const BoundaryExpr& e) {
    return BoundaryExpr(std::make_shared<Node>(
        Node{Op::Conj, std::nullopt, {}, nullptr, nullptr, e.node_, nullptr}));
  }
  friend BoundaryExpr operator+(const BoundaryExpr& x, const BoundaryExpr& y) {
    return BoundaryExpr(std::make_shared<Node>(
        Node{Op::Add, std::nullopt, {}, nullptr, nullptr, x.node_, y.node_}));
  }
  friend BoundaryExpr operator*(const BoundaryExpr& x, const BoundaryExpr& y) {
    return BoundaryExpr(std::make_shared<Node>(
        Node{Op::Mul, std::nullopt, {}, nullptr, nullptr, x.node_, y.node_}));
  }
  friend BoundaryExpr operator-(const BoundaryExpr& x, const BoundaryExpr& y) {
    return x + constant(-1.0) * y;
  }
  friend BoundaryExpr operator-(const BoundaryExpr& x) { return constant(-1.0) * x; }

  Complex eval(const BoundaryPoint& p) const { return eval_node(*node_, p); }

  /// Interior evaluation for circle-domain leaves (annulus circles). The
  /// involution acts pointwise: (f*)(z) = conj(f(z)).
  Complex eval_at(Complex z) const { return eval_at_node(*node_, z); }

  std::optional<Domain> domain() const { return domain_of(*node_); }
  bool has_delay() const { return delay_of(*node_); }

  AxisTermFunction axis_terms() const { return terms_of(*node_); }

 private:
  static Complex eval_node(const Node& n, const BoundaryPoint& p) {
    switch (n.op) {
      case Op::Leaf: return n.elem->evaluate(p);
      case Op::Fn: return n.fn(p);
      case Op::Const: return n.value;
      case Op::Conj: return std::conj(eval_node(*n.a, p));
      case Op::Add: return eval_node(*n.a, p) + eval_node(*n.b, p);
      case Op::Mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
    }
    throw Error("unreachable");
  }

  static Complex eval_at_node(const Node& n, Complex z) {
    switch (n.op) {
      case Op::Leaf: return n.elem->evaluate_at(z);
      case Op::Fn:
        if (!n.fn_at) throw DomainMismatch("symbol has no interior evaluation");
        return n.fn_at(z);
      case Op::Const: return n.value;
      case Op::Conj: return std::conj(eval_at_node(*n.a, z));
      case Op::Add: return eval_at_node(*n.a, z) + eval_at_node(*n.b, z);
      case Op::Mul: return eval_at_node(*n.a, z) * eval_at_node(*n.b, z);
    }
    throw Error("unreachable");
  }

  static std::optional<Domain> domain_of(const Node& n) {
    switch (n.op) {
      case Op::Leaf: return n.elem->domain();
      case Op::Fn:
      case Op::Const: return std::nullopt;
      case Op::Conj: return domain_of(*n.a);
      case Op::Add:
      case Op::Mul: {
        auto da = domain_of(*n.a);
        auto db = domain_of(*n.b);
        if (da && db && *da != *db) throw DomainMismatch("mixed-domain expression");
        return da ? da : db;
      }
    }
    throw Error("unreachable");
  }

  static bool delay_of(const Node& n) {
    switch (n.op) {
      case Op::Leaf: return n.elem->has_delay();
      case Op::Fn:
      case Op::Const: return false;
      case Op::Conj: return delay_of(*n.a);
      case Op::Add:
      case Op::Mul: return delay_of(*n.a) || delay_of(*n.b);
    }
    throw Error("unreachable");
  }

  static AxisTermFunction terms_of(const Node& n) {
    switch (n.op) {
      case Op::Leaf: return AxisTermFunction::from_element(*n.elem);
      case Op::Fn: throw DomainMismatch("opaque symbols have no axis term form");
      case Op::Const:
        if (std::abs(n.value.imag()) > 1e-15 * std::abs(n.value))
          throw Error("axis term algebra holds real constants only");
        return AxisTermFunction::constant(n.value.real());
      case Op::Conj: return terms_of(*n.a).conjugated();
      case Op::Add: return terms_of(*n.a) + terms_of(*n.b);
      case Op::Mul: return terms_of(*n.a) * terms_of(*n.b);
    }
    throw Error("unreachable");
  }

  std::shared_ptr<const Node> node_;
};

}  // namespace nuchord
