#include "reyeweb/schubert.hpp"

#include <sstream>

namespace reyeweb {

namespace {

constexpr int kGrade[6] = {0, 1, 2, 2, 3, 4};

// kTable[i][j] = coefficients of basis_i * basis_j over the six basis classes.
// Pieri in G(2,4): s1*s1 = s2 + s11, s1*s2 = s1*s11 = s21, s1*s21 = s22,
// s2*s2 = s11*s11 = s22, s2*s11 = 0; everything past codimension 4 is 0.
constexpr long long kTable[6][6][6] = {
    // 1 * _
    {{1, 0, 0, 0, 0, 0},
     {0, 1, 0, 0, 0, 0},
     {0, 0, 1, 0, 0, 0},
     {0, 0, 0, 1, 0, 0},
     {0, 0, 0, 0, 1, 0},
     {0, 0, 0, 0, 0, 1}},
    // s1 * _
    {{0, 1, 0, 0, 0, 0},
     {0, 0, 1, 1, 0, 0},
     {0, 0, 0, 0, 1, 0},
     {0, 0, 0, 0, 1, 0},
     {0, 0, 0, 0, 0, 1},
     {0, 0, 0, 0, 0, 0}},
    // s2 * _
    {{0, 0, 1, 0, 0, 0},
     {0, 0, 0, 0, 1, 0},
     {0, 0, 0, 0, 0, 1},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0}},
    // s11 * _
    {{0, 0, 0, 1, 0, 0},
     {0, 0, 0, 0, 1, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 1},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0}},
    // s21 * _
    {{0, 0, 0, 0, 1, 0},
     {0, 0, 0, 0, 0, 1},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0}},
    // s22 * _
    {{0, 0, 0, 0, 0, 1},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0},
     {0, 0, 0, 0, 0, 0}}};

const char* kNames[6] = {"1", "s1", "s2", "s11", "s21", "s22"};

}  // namespace

int schubert_grade(int index) { return kGrade[index]; }

SchubertClass SchubertClass::operator+(const SchubertClass& o) const {
  SchubertClass r;
  for (int i = 0; i < 6; ++i) r.c[i] = c[i] + o.c[i];
  return r;
}

SchubertClass SchubertClass::operator-(const SchubertClass& o) const {
  SchubertClass r;
  for (int i = 0; i < 6; ++i) r.c[i] = c[i] - o.c[i];
  return r;
}

SchubertClass SchubertClass::operator*(const SchubertClass& o) const {
  SchubertClass r;
  for (int i = 0; i < 6; ++i) {
    if (c[i] == 0) continue;
    for (int j = 0; j < 6; ++j) {
      if (o.c[j] == 0) continue;
      for (int k = 0; k < 6; ++k) r.c[k] += c[i] * o.c[j] * kTable[i][j][k];
    }
  }
  return r;
}

SchubertClass SchubertClass::scaled(long long k) const {
  SchubertClass r;
  for (int i = 0; i < 6; ++i) r.c[i] = c[i] * k;
  return r;
}

bool SchubertClass::is_homogeneous(int grade) const {
  for (int i = 0; i < 6; ++i)
    if (c[i] != 0 && kGrade[i] != grade) return false;
  return true;
}

std::string SchubertClass::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < 6; ++i) {
    if (c[i] == 0) continue;
    if (!first) os << (c[i] > 0 ? " + " : " - ");
    else if (c[i] < 0) os << "-";
    long long a = c[i] > 0 ? c[i] : -c[i];
    if (a != 1 || i == 0) os << a;
    if (i != 0) {
      if (a != 1) os << "*";
      os << kNames[i];
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

long long order_of(const SchubertClass& x) { return (x * SchubertClass::s2()).c[5]; }

long long class_of(const SchubertClass& x) { return (x * SchubertClass::s11()).c[5]; }

long long degree_of(const SchubertClass& x) {
  SchubertClass s1 = SchubertClass::s1();
  return (x * s1 * s1).c[5];
}

SchubertClass porteous_reye() {
  SchubertClass s1 = SchubertClass::s1();
  SchubertClass c1 = s1.scaled(3);
  SchubertClass c2 = (s1 * s1).scaled(2) + SchubertClass::s11().scaled(4);
  return c1 * c1 - c2;
}

std::vector<KnownCongruence> known_classes_table() {
  std::vector<KnownCongruence> t;
  {
    SchubertClass reye = porteous_reye();
    t.push_back({"reye", order_of(reye), class_of(reye), degree_of(reye), reye,
                 "degeneracy class of the web evaluation map"});
  }
  {
    SchubertClass b = SchubertClass::s2().scaled(12) + SchubertClass::s11().scaled(28);
    t.push_back({"quartic_bitangents", order_of(b), class_of(b), degree_of(b), b,
                 "bitangent lines of a general quartic surface (recorded, not derived)"});
  }
  return t;
}

}  // namespace reyeweb
