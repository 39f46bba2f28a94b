#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "iacforge/curate/curate.hpp"
#include "iacforge/harness/checks.hpp"
#include "iacforge/harness/harness.hpp"
#include "iacforge/hcl/parser.hpp"
#include "iacforge/policy/policy.hpp"
#include "iacforge/util/jsonl.hpp"
#include "mock_llm.hpp"
#include "repo_fixture.hpp"

using namespace iacforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& stem) {
  static int counter = 0;
  auto dir = fs::temp_directory_path() /
             (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::vector<harness::Finding> findings_for(const harness::CheckPack& pack,
                                           const std::string& config_text,
                                           const std::string& check_id) {
  auto result = harness::run_pack(pack, hcl::parse_config(config_text));
  std::vector<harness::Finding> out;
  for (auto& f : result.findings) {
    if (f.check_id == check_id) out.push_back(std::move(f));
  }
  return out;
}

policy::Policy passing_policy(const std::string& config_text) {
  return policy::parse_policy_json(testsupport::passing_policy_json_for(config_text));
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("lint pack is quiet on well-formed modules") {
  for (const auto& entry : testsupport::fixture_corpus({.clean = 4, .two_module = 2})) {
    CAPTURE(entry.repo_id);
    auto result = harness::run_pack(harness::lint_pack(), hcl::parse_config(entry.text));
    CHECK(result.findings.empty());
    CHECK(result.passed == result.applicable);
  }
}

TEST_CASE("unused variables are flagged; mentions in opaque expressions count as use") {
  const char* unused =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "variable \"ghost\" {\n  default = \"x\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n}\n";
  auto flagged = findings_for(harness::lint_pack(), unused, "unused-variable");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].subject == "variable.ghost");

  // a function call is beyond the structural expression grammar, yet the
  // variable mention inside it still counts as usage
  const char* opaque_use =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "variable \"suffix\" {\n  default = \"x\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = join(\"-\", [\"demo\", var.suffix])\n}\n";
  CHECK(findings_for(harness::lint_pack(), opaque_use, "unused-variable").empty());
}

TEST_CASE("structural references to undeclared variables are flagged") {
  const char* undeclared =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = var.missing\n}\n";
  auto flagged =
      findings_for(harness::lint_pack(), undeclared, "undeclared-variable-reference");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].message.find("missing") != std::string::npos);

  // a parsed interpolation is structural evidence and is reported too
  const char* interpolated =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo-${var.also_missing}\"\n}\n";
  CHECK(findings_for(harness::lint_pack(), interpolated, "undeclared-variable-reference")
            .size() == 1);

  // a mention inside an opaque expression is not evidence enough to report
  const char* textual_only =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = join(\"-\", [\"demo\", var.maybe])\n}\n";
  CHECK(findings_for(harness::lint_pack(), textual_only, "undeclared-variable-reference")
            .empty());
}

TEST_CASE("provider usage is checked in both directions") {
  const char* unused_provider =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\nprovider \"random\" {}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n}\n";
  auto flagged = findings_for(harness::lint_pack(), unused_provider, "unused-provider");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].subject == "provider.random");

  const char* missing_provider =
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n}\n";
  auto missing =
      findings_for(harness::lint_pack(), missing_provider, "missing-provider-block");
  REQUIRE(missing.size() == 1);
  CHECK(missing[0].subject == "aws");
}

TEST_CASE("empty bodies and duplicate output names are flagged") {
  const char* empty_body =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"hollow\" {\n}\n";
  auto flagged = findings_for(harness::lint_pack(), empty_body, "empty-resource-body");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].subject == "aws_s3_bucket.hollow");

  const char* dup_outputs =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n}\n\n"
      "output \"name\" {\n  value = \"one\"\n}\n\n"
      "output \"name\" {\n  value = \"two\"\n}\n";
  auto dups = findings_for(harness::lint_pack(), dup_outputs, "duplicate-output-name");
  REQUIRE(dups.size() == 1);
  CHECK(dups[0].subject == "output.name");
}

TEST_CASE("s3 checks read versioning, acl and encryption evidence") {
  const auto& pack = harness::security_pack();
  const char* hardened =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n"
      "  bucket = \"demo\"\n  acl = \"private\"\n"
      "  versioning {\n    enabled = true\n  }\n"
      "  server_side_encryption_configuration {\n    rule {\n      sse_algorithm = \"aws:kms\"\n    }\n  }\n"
      "}\n";
  auto clean = harness::run_pack(pack, hcl::parse_config(hardened));
  CHECK(clean.findings.empty());
  CHECK(clean.applicable == 3);  // the three s3 checks, one bucket each
  CHECK(clean.passed == 3);

  const char* v2_style =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n"
      "  bucket = \"demo\"\n"
      "  versioning_configuration {\n    status = \"Enabled\"\n  }\n"
      "}\n";
  CHECK(findings_for(pack, v2_style, "s3-versioning-enabled").empty());

  const char* bare =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n  acl = \"public-read\"\n}\n";
  CHECK(findings_for(pack, bare, "s3-versioning-enabled").size() == 1);
  CHECK(findings_for(pack, bare, "s3-encryption-configured").size() == 1);
  auto acl = findings_for(pack, bare, "s3-no-public-acl");
  REQUIRE(acl.size() == 1);
  CHECK(acl[0].subject == "aws_s3_bucket.b");

  // no acl attribute at all is fine
  const char* no_acl =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n}\n";
  CHECK(findings_for(pack, no_acl, "s3-no-public-acl").empty());

  // an acl that only resolves at apply time cannot be attested
  const char* computed_acl =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "provider \"random\" {}\n\n"
      "resource \"random_pet\" \"p\" {\n  length = 2\n}\n\n"
      "resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"demo\"\n  acl = random_pet.p.id\n}\n";
  auto computed = findings_for(pack, computed_acl, "s3-no-public-acl");
  REQUIRE(computed.size() == 1);
  CHECK(computed[0].message.find("cannot be resolved statically") != std::string::npos);
}

TEST_CASE("storage and database encryption checks") {
  const auto& pack = harness::security_pack();
  const char* volumes =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_ebs_volume\" \"safe\" {\n  size = 10\n  encrypted = true\n}\n\n"
      "resource \"aws_ebs_volume\" \"open\" {\n  size = 10\n}\n";
  auto flagged = findings_for(pack, volumes, "ebs-volume-encrypted");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].subject == "aws_ebs_volume.open");

  const char* dbs =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_db_instance\" \"main\" {\n"
      "  engine = \"postgres\"\n  storage_encrypted = true\n  publicly_accessible = true\n}\n\n"
      "resource \"aws_rds_cluster\" \"c\" {\n  engine = \"aurora\"\n}\n";
  CHECK(findings_for(pack, dbs, "db-storage-encrypted").size() == 1);  // the bare cluster
  auto public_db = findings_for(pack, dbs, "db-not-publicly-accessible");
  REQUIRE(public_db.size() == 1);
  CHECK(public_db[0].subject == "aws_db_instance.main");
}

TEST_CASE("network exposure checks") {
  const auto& pack = harness::security_pack();
  const char* groups =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_security_group\" \"open\" {\n"
      "  name = \"open\"\n"
      "  ingress {\n    from_port = 22\n    to_port = 22\n"
      "    cidr_blocks = [\"10.0.0.0/8\", \"0.0.0.0/0\"]\n  }\n}\n\n"
      "resource \"aws_security_group\" \"tight\" {\n"
      "  name = \"tight\"\n"
      "  ingress {\n    from_port = 443\n    to_port = 443\n"
      "    cidr_blocks = [\"10.0.0.0/8\"]\n  }\n}\n";
  auto flagged = findings_for(pack, groups, "sg-no-unrestricted-ingress");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].subject == "aws_security_group.open");
  CHECK(flagged[0].message.find("0.0.0.0/0") != std::string::npos);

  const char* instances =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_instance\" \"exposed\" {\n"
      "  ami = \"ami-1\"\n  associate_public_ip_address = true\n}\n\n"
      "resource \"aws_instance\" \"plain\" {\n  ami = \"ami-1\"\n}\n";
  auto ips = findings_for(pack, instances, "instance-no-public-ip");
  REQUIRE(ips.size() == 1);
  CHECK(ips[0].subject == "aws_instance.exposed");
}

TEST_CASE("iam wildcard check needs a statically readable document") {
  const auto& pack = harness::security_pack();
  const char* wildcard =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_iam_policy\" \"admin\" {\n"
      "  name = \"admin\"\n"
      "  policy = \"{ \\\"Statement\\\": [ { \\\"Action\\\": \\\"*\\\" } ] }\"\n}\n";
  CHECK(findings_for(pack, wildcard, "iam-no-wildcard-actions").size() == 1);

  const char* scoped =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_iam_policy\" \"narrow\" {\n"
      "  name = \"narrow\"\n"
      "  policy = \"{ \\\"Statement\\\": [ { \\\"Action\\\": \\\"s3:GetObject\\\" } ] }\"\n}\n";
  CHECK(findings_for(pack, scoped, "iam-no-wildcard-actions").empty());

  const char* no_doc =
      "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n"
      "resource \"aws_iam_policy\" \"blank\" {\n  name = \"blank\"\n}\n";
  auto flagged = findings_for(pack, no_doc, "iam-no-wildcard-actions");
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].message.find("cannot be resolved statically") != std::string::npos);
}

TEST_CASE("instance evaluation respects the verification hierarchy") {
  auto policy = testsupport::mixed_policy(2, 0);

  auto correct = harness::evaluate_instance(testsupport::kS3ContainerConfig, policy);
  CHECK(correct.compilable);
  CHECK(correct.deployable);
  CHECK(correct.correct);

  auto wrong = harness::evaluate_instance(testsupport::kS3ContainerConfig,
                                          testsupport::mixed_policy(1, 1));
  CHECK(wrong.compilable);
  CHECK(wrong.deployable);
  CHECK_FALSE(wrong.correct);

  auto unplannable = harness::evaluate_instance(testsupport::kCycleConfig, policy);
  CHECK(unplannable.compilable);
  CHECK_FALSE(unplannable.deployable);
  CHECK_FALSE(unplannable.correct);

  auto invalid = harness::evaluate_instance(testsupport::kUnresolvedConfig, policy);
  CHECK_FALSE(invalid.compilable);
  CHECK_FALSE(invalid.deployable);
  CHECK_FALSE(invalid.correct);
}

TEST_CASE("an unparseable candidate scores zero everywhere") {
  auto mv = harness::evaluate_instance("not hcl {{{", testsupport::mixed_policy(1, 0));
  CHECK_FALSE(mv.compilable);
  CHECK_FALSE(mv.deployable);
  CHECK_FALSE(mv.correct);
  CHECK_FALSE(mv.lint_pass);
  REQUIRE(mv.security_compliance.has_value());
  CHECK(*mv.security_compliance == 0.0);
}

TEST_CASE("lint and security columns come from the builtin packs") {
  auto entry = testsupport::fixture_corpus({.clean = 1})[0];
  auto mv = harness::evaluate_instance(entry.text, passing_policy(entry.text));
  CHECK(mv.correct);
  CHECK(mv.lint_pass);
  // the clean fixture keeps versioning on but configures no encryption
  REQUIRE(mv.security_compliance.has_value());
  CHECK(*mv.security_compliance > 0.0);
  CHECK(*mv.security_compliance < 100.0);

  // a module without security-relevant resources has nothing to attest
  const char* neutral = "provider \"random\" {}\n\nresource \"random_pet\" \"p\" {\n  length = 2\n}\n";
  auto neutral_mv =
      harness::evaluate_instance(neutral, policy::parse_policy_json(
          "{\"id\":\"p\",\"rules\":[{\"name\":\"has_pet\",\"predicate\":\"resource_exists\","
          "\"params\":{\"type\":\"random_pet\"}}]}"));
  CHECK(neutral_mv.correct);
  CHECK_FALSE(neutral_mv.security_compliance.has_value());
}

TEST_CASE("aggregation averages instances and tolerates absent security") {
  harness::MetricVector a{true, true, true, true, 100.0};
  harness::MetricVector b{true, true, false, false, 50.0};
  harness::MetricVector c{true, false, false, true, std::nullopt};
  harness::MetricVector d{false, false, false, false, std::nullopt};

  auto report = harness::aggregate({a, b, c, d});
  CHECK(report.instances == 4);
  CHECK(report.compilability == doctest::Approx(75.0));
  CHECK(report.deployability == doctest::Approx(50.0));
  CHECK(report.correctness == doctest::Approx(25.0));
  CHECK(report.lint_pass_rate == doctest::Approx(50.0));
  REQUIRE(report.security_compliance.has_value());
  CHECK(*report.security_compliance == doctest::Approx(75.0));

  // order does not matter
  auto shuffled = harness::aggregate({d, b, a, c});
  CHECK(shuffled.to_json() == report.to_json());

  auto none = harness::aggregate({c, d});
  CHECK_FALSE(none.security_compliance.has_value());
  CHECK(none.to_json()["security_compliance"].is_null());

  CHECK_THROWS_AS(harness::aggregate({}), harness::EmptyDataset);

  auto text = report.to_text();
  CHECK(text.find("Instances") != std::string::npos);
  CHECK(text.find("Compilability") != std::string::npos);
  CHECK(text.find("75.00") != std::string::npos);
  auto bare = harness::aggregate({c, d}).to_text();
  CHECK(bare.find("n/a") != std::string::npos);
}

TEST_CASE("benchmark scores a candidates file against the dataset") {
  auto dir = temp_dir("bench");
  auto dataset = dir / "dataset.jsonl";
  auto candidates = dir / "candidates.jsonl";

  auto entries = testsupport::fixture_corpus({.clean = 5});
  for (const auto& e : entries) {
    util::append_jsonl(dataset, {{"id", e.repo_id},
                                 {"policy", passing_policy(e.text).to_json()}});
    util::append_jsonl(candidates, {{"id", e.repo_id}, {"config", e.text}});
  }

  harness::BenchmarkOptions options;
  options.out_dir = dir / "out";
  auto result = harness::run_benchmark(dataset, candidates, options);

  CHECK(result.report.instances == 5);
  CHECK(result.report.compilability == doctest::Approx(100.0));
  CHECK(result.report.deployability == doctest::Approx(100.0));
  CHECK(result.report.correctness == doctest::Approx(100.0));
  CHECK(result.report.lint_pass_rate == doctest::Approx(100.0));
  REQUIRE(result.per_instance.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(result.per_instance[i].first == entries[i].repo_id);
    CHECK(result.per_instance[i].second.correct);
  }

  // artifacts land on disk
  std::ifstream json_in(options.out_dir / "report.json");
  REQUIRE(json_in.good());
  auto written = nlohmann::json::parse(json_in);
  CHECK(written == result.report.to_json());

  std::ifstream csv(options.out_dir / "per_instance.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "id,compilable,deployable,correct,lint,security");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.find(",1,1,1,1,") != std::string::npos);
  }
  CHECK(rows == 5);

  // workers > 1 produce the same report
  harness::BenchmarkOptions parallel;
  parallel.workers = 3;
  auto threaded = harness::run_benchmark(dataset, candidates, parallel);
  CHECK(threaded.report.to_json() == result.report.to_json());

  fs::remove_all(dir);
}

TEST_CASE("id mismatches are reported in both directions") {
  auto dir = temp_dir("bench-mismatch");
  auto dataset = dir / "dataset.jsonl";
  auto candidates = dir / "candidates.jsonl";

  auto entries = testsupport::fixture_corpus({.clean = 2});
  for (const auto& e : entries) {
    util::append_jsonl(dataset, {{"id", e.repo_id},
                                 {"policy", passing_policy(e.text).to_json()}});
  }
  util::append_jsonl(candidates, {{"id", entries[0].repo_id}, {"config", entries[0].text}});
  util::append_jsonl(candidates, {{"id", "stranger"}, {"config", entries[1].text}});
  // duplicate submissions for one id are also surplus
  util::append_jsonl(candidates, {{"id", entries[0].repo_id}, {"config", entries[0].text}});

  try {
    harness::run_benchmark(dataset, candidates, {});
    FAIL("expected IdMismatch");
  } catch (const harness::IdMismatch& e) {
    CHECK(e.missing == std::vector<std::string>{entries[1].repo_id});
    REQUIRE(e.extra.size() == 2);
    CHECK(e.extra[0] == "stranger");
    CHECK(e.extra[1] == entries[0].repo_id);
  }
  fs::remove_all(dir);
}

TEST_CASE("metric vectors serialize with explicit null for absent security") {
  harness::MetricVector mv{true, false, false, true, std::nullopt};
  auto j = mv.to_json();
  CHECK(j["compilable"] == true);
  CHECK(j["deployable"] == false);
  CHECK(j["lint_pass"] == true);
  CHECK(j["security_compliance"].is_null());

  mv.security_compliance = 62.5;
  CHECK(mv.to_json()["security_compliance"] == 62.5);
}

}  // TEST_SUITE
