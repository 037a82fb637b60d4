// Copyright 2026 The qafem Authors.
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qafem {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
    using Error::Error;
};

/// Degenerate geometry (non-positive Jacobian and friends).
class MeshQualityError : public Error {
 public:
    MeshQualityError(std::size_t element, const std::string& what)
        : Error("element " + std::to_string(element) + ": " + what), element_(element) {}

    std::size_t element() const noexcept { return element_; }

 private:
    std::size_t element_;
};

class DomainError : public Error {
 public:
    using Error::Error;
};

/// Caller broke a dimensional or structural precondition.
class ContractError : public Error {
 public:
    using Error::Error;
};

class NumericError : public Error {
 public:
    using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
    using Error::Error;
};

class ConfigError : public Error {
 public:
    using Error::Error;
};

class UnsupportedLawError : public Error {
 public:
    using Error::Error;
};

/// Problem larger than what a sampler backend accepts.
class CapacityError : public Error {
 public:
    using Error::Error;
};

/// Failure talking to an external sampler process. The raw payload, when
/// one was received, is kept for diagnostics.
class TransportError : public Error {
 public:
    TransportError(const std::string& what, std::string payload = {})
        : Error(what), payload_(std::move(payload)) {}

    const std::string& payload() const noexcept { return payload_; }

 private:
    std::string payload_;
};

class TimeoutError : public TransportError {
 public:
    using TransportError::TransportError;
};

class MalformedResponseError : public TransportError {
 public:
    using TransportError::TransportError;
};

class RemoteError : public TransportError {
 public:
    using TransportError::TransportError;
};

/// Request rejected before it was sent.
class ProtocolError : public Error {
 public:
    using Error::Error;
};

}  // namespace qafem
