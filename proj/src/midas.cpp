#include "survmidas/midas.hpp"

#include <fstream>

namespace survmidas {

std::string family_name(DictFamily f) {
  switch (f) {
    case DictFamily::jacobi: return "jacobi";
    case DictFamily::legendre: return "legendre";
    case DictFamily::gegenbauer: return "gegenbauer";
    case DictFamily::chebyshev1: return "chebyshev1";
    case DictFamily::chebyshev2: return "chebyshev2";
    case DictFamily::unrestricted: return "unrestricted";
  }
  return "unknown";
}

Mat jacobi_polynomials(double ap, double bp, int L, const Vec& x) {
  if (ap <= -1.0 || bp <= -1.0)
    throw std::domain_error("jacobi polynomial parameters must exceed -1");
  if (L < 1) throw std::domain_error("dictionary size L must be >= 1");
  Mat P(x.size(), L);
  P.col(0).setOnes();
  if (L == 1) return P;
  // degree-1 closed form; the n = 0 step of the recurrence divides by
  // (2n + a + b) which vanishes when a + b = 0
  P.col(1) = (0.5 * (ap + bp + 2.0)) * x.array() + 0.5 * (ap - bp);
  for (int n = 1; n + 1 < L; ++n) {
    const double s = 2.0 * n + ap + bp;
    const double a = (s + 1.0) * (s + 2.0) / (2.0 * (n + 1.0) * (n + ap + bp + 1.0));
    const double b =
        (s + 1.0) * (ap * ap - bp * bp) / (2.0 * (n + 1.0) * (n + ap + bp + 1.0) * s);
    const double c =
        (ap + n) * (bp + n) * (s + 2.0) / ((n + 1.0) * (n + ap + bp + 1.0) * s);
    P.col(n + 1) =
        a * (x.array() * P.col(n).array()) + b * P.col(n).array() - c * P.col(n - 1).array();
  }
  return P;
}

namespace {

MidasDictionary make_poly_dict(DictFamily fam, double ap, double bp, int L, int d) {
  if (d < 1) throw std::domain_error("lag count d must be >= 1");
  MidasDictionary dict;
  dict.family = fam;
  dict.alpha_poly = ap;
  dict.beta_poly = bp;
  dict.L = L;
  dict.d = d;
  Vec x(d);
  for (int j = 0; j < d; ++j) x[j] = 2.0 * (static_cast<double>(j) / d) - 1.0;
  dict.w = jacobi_polynomials(ap, bp, L, x) / static_cast<double>(d);
  return dict;
}

}  // namespace

MidasDictionary jacobi_dictionary(double ap, double bp, int L, int d) {
  return make_poly_dict(DictFamily::jacobi, ap, bp, L, d);
}
MidasDictionary legendre_dictionary(int L, int d) {
  return make_poly_dict(DictFamily::legendre, 0.0, 0.0, L, d);
}
MidasDictionary gegenbauer_dictionary(double ap, int L, int d) {
  return make_poly_dict(DictFamily::gegenbauer, ap, ap, L, d);
}
MidasDictionary chebyshev_dictionary(int kind, int L, int d) {
  if (kind == 1) return make_poly_dict(DictFamily::chebyshev1, -0.5, -0.5, L, d);
  if (kind == 2) return make_poly_dict(DictFamily::chebyshev2, 0.5, 0.5, L, d);
  throw std::domain_error("chebyshev kind must be 1 or 2");
}

MidasDictionary unrestricted_dictionary(int d) {
  if (d < 1) throw std::domain_error("lag count d must be >= 1");
  MidasDictionary dict;
  dict.family = DictFamily::unrestricted;
  dict.L = d;
  dict.d = d;
  dict.w = Mat::Identity(d, d) / static_cast<double>(d);
  return dict;
}

MidasDictionary default_dictionary(int d) { return gegenbauer_dictionary(-0.5, 3, d); }

MidasDictionary parse_dictionary(const std::string& spec, int L, int d) {
  auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "legendre") return legendre_dictionary(L, d);
  if (name == "chebyshev1") return chebyshev_dictionary(1, L, d);
  if (name == "chebyshev2") return chebyshev_dictionary(2, L, d);
  if (name == "unrestricted") return unrestricted_dictionary(d);
  if (name == "gegenbauer") {
    const double a = args.empty() ? -0.5 : std::stod(args);
    return gegenbauer_dictionary(a, L, d);
  }
  if (name == "jacobi") {
    auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("jacobi dictionary needs 'jacobi:a,b'");
    return jacobi_dictionary(std::stod(args.substr(0, comma)),
                             std::stod(args.substr(comma + 1)), L, d);
  }
  throw std::invalid_argument("unknown dictionary family: " + name);
}

DesignMatrix design_layout(Mat x, int k, int L) {
  DesignMatrix dm;
  dm.x = std::move(x);
  const int p = dm.p();
  if (p != k * L + 1) throw std::invalid_argument("design width must be K*L + 1");
  dm.groups.resize(static_cast<std::size_t>(k) + 1);
  dm.groups[0] = {0};
  for (int g = 1; g <= k; ++g) {
    dm.groups[static_cast<std::size_t>(g)].resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l)
      dm.groups[static_cast<std::size_t>(g)][static_cast<std::size_t>(l)] =
          1 + (g - 1) * L + l;
  }
  dm.penalized.assign(static_cast<std::size_t>(p), true);
  dm.penalized[0] = false;
  return dm;
}

DesignMatrix aggregate(const Dataset& ds, const MidasDictionary& dict) {
  if (dict.d != ds.d())
    throw std::invalid_argument("dictionary lag count " + std::to_string(dict.d) +
                                " does not match panel lag count " +
                                std::to_string(ds.d()));
  const int n = ds.n(), K = ds.k(), L = dict.L;
  Mat x(n, K * L + 1);
  x.col(0).setOnes();
  for (int i = 0; i < n; ++i) {
    const Mat agg = ds.records[static_cast<std::size_t>(i)].panel * dict.w;  // K x L
    for (int k = 0; k < K; ++k) x.block(i, 1 + k * L, 1, L) = agg.row(k);
  }
  return design_layout(std::move(x), K, L);
}

Mat expand_weights(const Vec& beta, const MidasDictionary& dict) {
  const int L = dict.L;
  if ((beta.size() - 1) % L != 0)
    throw std::invalid_argument("coefficient vector is not intercept + K groups of L");
  const int K = static_cast<int>((beta.size() - 1) / L);
  Mat theta(K, dict.d);
  for (int k = 0; k < K; ++k)
    theta.row(k) = (dict.w * beta.segment(1 + k * L, L)).transpose();
  return theta;
}

void save_dictionary_csv(const MidasDictionary& dict, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.precision(17);
  for (int j = 0; j < dict.d; ++j) {
    for (int l = 0; l < dict.L; ++l) out << (l ? "," : "") << dict.w(j, l);
    out << '\n';
  }
}

}  // namespace survmidas
