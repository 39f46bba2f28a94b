#include "fixtures.hpp"

namespace testsupport {

const char* kS3ContainerConfig = R"(provider "aws" {
  region = "us-east-1"
}

provider "docker" {}

resource "aws_s3_bucket" "artifact_store" {
  bucket = "demo-artifact-store"
}

resource "docker_container" "app" {
  image      = "nginx:latest"
  name       = "app"
  depends_on = [aws_s3_bucket.artifact_store]
}
)";

const char* kS3ContainerConfigMessy = R"(// application container
resource "docker_container" "app" {
  depends_on = [aws_s3_bucket.artifact_store]  # ordering
  name  = "app"
  image = "nginx:latest"
}

provider "docker" {
}

/* store for build artifacts */
resource "aws_s3_bucket" "artifact_store" {
      bucket = "demo-artifact-store"
}

provider "aws" {
  region = "us-east-1"   // virginia
}
)";

const char* kCycleConfig = R"(provider "aws" {
  region = "us-east-1"
}

resource "aws_s3_bucket" "a" {
  bucket     = "bucket-a"
  depends_on = [aws_s3_bucket.b]
}

resource "aws_s3_bucket" "b" {
  bucket     = "bucket-b"
  depends_on = [aws_s3_bucket.a]
}
)";

const char* kUnresolvedConfig = R"(provider "aws" {
  region = "us-east-1"
}

resource "aws_instance" "web" {
  ami           = "ami-0abc"
  instance_type = "t3.micro"
  subnet_id     = aws_subnet.missing.id
}
)";

iacforge::policy::Policy mixed_policy(int passing, int failing) {
  iacforge::policy::Policy p;
  p.id = "fixture";
  for (int i = 0; i < passing; ++i) {
    iacforge::policy::Rule r;
    r.name = "pass_" + std::to_string(i);
    r.predicate = iacforge::policy::PredicateKind::ResourceExists;
    r.params = {{"type", "aws_s3_bucket"}};
    p.rules.push_back(std::move(r));
  }
  for (int i = 0; i < failing; ++i) {
    iacforge::policy::Rule r;
    r.name = "fail_" + std::to_string(i);
    r.predicate = iacforge::policy::PredicateKind::ResourceExists;
    r.params = {{"type", "aws_lambda_function"}};
    p.rules.push_back(std::move(r));
  }
  return p;
}

}  // namespace testsupport
