#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace reyeweb {

/// Element of the Chow ring of the Grassmannian of lines in P^3, written over
/// the basis {1; s1; s2, s11; s21; s22} graded by codimension 0,1,2,2,3,4.
///
/// Convention: s2 is the class of lines through a general point and s11 the
/// class of lines in a general plane, so a congruence a*s2 + b*s11 has order a
/// and class b. (The literature writes the same class with either subscript
/// order; a (7,3)-congruence here is always 7*s2 + 3*s11.)
struct SchubertClass {
  // index: 0 -> 1, 1 -> s1, 2 -> s2, 3 -> s11, 4 -> s21, 5 -> s22
  std::array<long long, 6> c{};

  static SchubertClass unit() { return basis(0); }
  static SchubertClass s1() { return basis(1); }
  static SchubertClass s2() { return basis(2); }
  static SchubertClass s11() { return basis(3); }
  static SchubertClass s21() { return basis(4); }
  static SchubertClass s22() { return basis(5); }

  static SchubertClass basis(int i) {
    SchubertClass r;
    r.c[static_cast<std::size_t>(i)] = 1;
    return r;
  }

  bool operator==(const SchubertClass& o) const { return c == o.c; }
  bool operator!=(const SchubertClass& o) const { return !(*this == o); }

  SchubertClass operator+(const SchubertClass& o) const;
  SchubertClass operator-(const SchubertClass& o) const;
  SchubertClass operator*(const SchubertClass& o) const;  ///< Pieri products, grade > 4 truncated
  SchubertClass scaled(long long k) const;

  /// True when every nonzero coefficient sits in codimension `grade`.
  bool is_homogeneous(int grade) const;

  std::string to_string() const;
};

/// Codimension of each basis element, by index.
int schubert_grade(int index);

/// Intersection pairing against s2: the order of a congruence class.
long long order_of(const SchubertClass& x);

/// Intersection pairing against s11: the class of a congruence class.
long long class_of(const SchubertClass& x);

/// Pairing against s1^2: the degree of the congruence as a surface in P^5.
long long degree_of(const SchubertClass& x);

/// Thom-Porteous class of the rank <= 2 locus of the evaluation map
/// O^4 -> Sym^2 U* on the Grassmannian: c1^2 - c2 of Sym^2 U*, with
/// c1 = 3 s1 and c2 = 2 s1^2 + 4 s11. Evaluates to 7 s2 + 3 s11.
SchubertClass porteous_reye();

struct KnownCongruence {
  std::string name;
  long long order;
  long long cls;
  long long degree;
  SchubertClass chow;
  std::string source;
};

/// Documented congruence classes: the Reye congruence (7,3) and the bitangent
/// congruence of a general quartic surface (12,28). The latter is recorded
/// data, not derived here.
std::vector<KnownCongruence> known_classes_table();

}  // namespace reyeweb
