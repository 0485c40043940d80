#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdk/report.hpp"

using namespace hdk;

TEST_CASE("report serialization is canonical and repeatable") {
  LabelField h = generate("honeycomb");
  DecompositionReport r1 = build_report(h);
  DecompositionReport r2 = build_report(h);
  CHECK(report_invariants_json(r1) == report_invariants_json(r2));
  CHECK(report_json(r1) == report_json(r2));
  CHECK(diff_reports(r1, r2).empty());
}

TEST_CASE("subdivision leaves the invariant report unchanged") {
  for (const char* name : {"honeycomb", "slabs", "t003", "checkerboard"}) {
    LabelField f = generate(name);
    DecompositionReport base = build_report(f);
    DecompositionReport doubled = build_report(subdivide(f, 2));
    INFO(name);
    CHECK(report_invariants_json(base) == report_invariants_json(doubled));
  }
}

TEST_CASE("different decompositions differ in the report") {
  DecompositionReport a = build_report(generate("honeycomb"));
  DecompositionReport b = build_report(generate("t003"));
  CHECK(!diff_reports(a, b).empty());
}

TEST_CASE("report text includes the type vector") {
  DecompositionReport r = build_report(generate("t003"));
  std::string text = report_text(r);
  CHECK(text.find("(0,0,3)") != std::string::npos);
}

TEST_CASE("reports with failing certificates have a null type") {
  DecompositionReport r = build_report(generate("slabs"));
  CHECK_FALSE(r.type.has_value());
  CHECK(report_invariants_json(r).find("\"type_vector\": null") != std::string::npos);
}
