#include <gtest/gtest.h>

#include "ncrank/ncrank.hpp"

namespace ncrank {
namespace {

Pencil skew3() { return gen_family({.kind = "skew", .s = 3}).T; }

TEST(PencilJson, RoundTrip) {
  Pencil T = gen_family({.kind = "random", .n = 2, .s = 3, .seed = 3}).T;
  T.A0(0, 1) = Rational(-7, 3);
  json j = pencil_to_json(T);
  EXPECT_EQ(j["format"], 1);
  EXPECT_EQ(j["A0"][0][1], "-7/3");
  Pencil U = pencil_from_json(parse_json_text(dump(j)));
  EXPECT_EQ(U.vars, T.vars);
  EXPECT_EQ(U.A0, T.A0);
  EXPECT_EQ(U.A, T.A);
  EXPECT_EQ(dump(pencil_to_json(U)), dump(j));
}

TEST(PencilJson, AcceptsIntegersAndRejectsBadInput) {
  Pencil T = pencil_from_json(parse_json_text(R"({"format":1,"s":1,"vars":["x1"],"A0":[[0]],"A":{"x1":[["2/4"]]}})"));
  EXPECT_EQ(T.A[0](0, 0), Rational(1, 2));

  const char* bad[] = {
      R"({"s":1,"vars":["x1"],"A0":[["0"]],"A":{"x1":[["1"]]}})",                       // no format
      R"({"format":2,"s":1,"vars":["x1"],"A0":[["0"]],"A":{"x1":[["1"]]}})",            // wrong format
      R"({"format":1,"s":1,"vars":["x1"],"A0":[["0"]],"A":{"x2":[["1"]]}})",            // key mismatch
      R"({"format":1,"s":2,"vars":["x1"],"A0":[["0"]],"A":{"x1":[["1"]]}})",            // shape
      R"({"format":1,"s":1,"vars":["x1"],"A0":[["1/0"]],"A":{"x1":[["1"]]}})",          // zero denominator
      R"({"format":1,"s":1,"vars":["x1","x1"],"A0":[["0"]],"A":{"x1":[["1"]]}})",       // duplicate
      R"({"format":1,"s":1,"vars":["x1"],"A0":[["zz"]],"A":{"x1":[["1"]]}})",           // not a number
      R"({"format":1,"s":1,"vars":["x1"],"A0":[["0"]],"A":{"x1":[["1"]]})",             // truncated
  };
  for (const char* text : bad) EXPECT_THROW(pencil_from_json(parse_json_text(text)), ParseError) << text;
}

TEST(WitnessJson, RoundTripKEntries) {
  Pencil T = skew3();
  NcrankResult res = ncrank::ncrank(T);
  ASSERT_EQ(res.r, 3u);
  ASSERT_FALSE(res.witness.is_rational());
  std::string text = dump(witness_to_json(T, res.witness));
  Witness w = witness_from_json(parse_json_text(text), T);
  EXPECT_EQ(w.r, res.witness.r);
  EXPECT_EQ(w.dim, res.witness.dim);
  EXPECT_EQ(w.cyclo_index, res.witness.cyclo_index);
  EXPECT_EQ(w.tuple.mats, res.witness.tuple.mats);
  EXPECT_TRUE(verify_witness(T, w));
  EXPECT_EQ(dump(witness_to_json(T, w)), text);
}

TEST(WitnessJson, MismatchIsParseError) {
  Pencil T = skew3();
  json j = witness_to_json(T, ncrank::ncrank(T).witness);
  Pencil other = gen_family({.kind = "random", .n = 2, .s = 3}).T;
  EXPECT_THROW(witness_from_json(j, other), ParseError);
  json k = j;
  k["matrices"]["x1_2"][0][0] = "1/";
  EXPECT_THROW(witness_from_json(k, T), ParseError);
  k = j;
  k["kind"] = "upper";
  EXPECT_THROW(witness_from_json(k, T), ParseError);
}

TEST(CertificateJson, RoundTripOneBased) {
  Pencil T = gen_family({.kind = "bipartite", .n = 3, .edges = "star"}).T;
  NcrankResult res = ncrank::ncrank(T);
  ASSERT_EQ(res.r, 1u);
  ASSERT_FALSE(res.certificate.pairs.empty());
  json j = certificate_to_json(T, res.certificate);
  EXPECT_EQ(j["pairs"][0][0], res.certificate.pairs[0].first + 1);
  UpperCertificate c = certificate_from_json(parse_json_text(dump(j)));
  EXPECT_EQ(c.pairs, res.certificate.pairs);
  EXPECT_EQ(c.digest, res.certificate.digest);
  EXPECT_TRUE(verify_upper_certificate(T, res.witness, c));
  c.digest[0] = c.digest[0] == '0' ? '1' : '0';
  EXPECT_FALSE(verify_upper_certificate(T, res.witness, c));
  j["pairs"][0][0] = 0;
  EXPECT_THROW(certificate_from_json(j), ParseError);
}

TEST(AbpJson, ParseAndRoundTrip) {
  json j = parse_json_text(R"({"format":1,"vars":["x1","x2"],"layers":[
    [[{"const":"0","coeffs":{"x1":"1"}}, {"coeffs":{"x2":"1"}}]],
    [[{"coeffs":{"x2":"1"}}], [{"const":"0","coeffs":{"x1":"-1"}}]]]})");
  Abp<FieldScalar> f = abp_from_json(j);
  EXPECT_FALSE(rs_zero_test(f));
  EXPECT_EQ(extract_monomial(f), Word({0, 1}));
  auto rf = rational_abp(f);
  ASSERT_TRUE(rf.has_value());
  EXPECT_EQ(abp_expand(*rf).size(), 2u);
  Abp<FieldScalar> g = abp_from_json(parse_json_text(dump(abp_to_json(f))));
  EXPECT_EQ(dump(abp_to_json(g)), dump(abp_to_json(f)));

  json k = parse_json_text(R"({"format":1,"vars":["x1"],"cycloIndex":3,"layers":[[["u"]]]})");
  Abp<FieldScalar> h = abp_from_json(k);
  EXPECT_FALSE(rational_abp(h).has_value());
  EXPECT_EQ(abp_to_json(h, 3)["cycloIndex"], 3);
  Abp<FieldScalar> h2 = abp_from_json(abp_to_json(h, 3));
  EXPECT_EQ(h2.layers[0].constant, h.layers[0].constant);
}

TEST(AbpJson, Rejects) {
  const char* bad[] = {
      R"({"format":1,"vars":["x1"],"layers":[]})",
      R"({"format":1,"vars":["x1"],"layers":[[["1","1"]]]})",                 // does not end w x 1
      R"({"format":1,"vars":["x1"],"layers":[[[{"coeffs":{"x9":"1"}}]]]})",   // unknown variable
      R"({"format":1,"vars":["x1"],"layers":[[["1"]],[["1"],["1"]]]})",        // shapes do not compose
      R"({"format":1,"vars":["x1"],"cycloIndex":0,"layers":[[["1"]]]})",
  };
  for (const char* text : bad) EXPECT_THROW(abp_from_json(parse_json_text(text)), ParseError) << text;
}

}  // namespace
}  // namespace ncrank
