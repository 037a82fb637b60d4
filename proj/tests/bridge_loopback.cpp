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

// Loopback sampler process for the bridge client tests. Reads one JSON
// request per line on stdin and answers with the exhaustive optimum.
//
//   --reverse N     collect N requests, answer them in reverse order
//   --garbage       answer with a line that is not JSON
//   --error         answer with an error object
//   --bad-energy    report an energy that does not match the sample
//   --sleep S       wait S seconds before every answer
//   --exit          exit without answering

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qafem/sampler.hpp"

int main(int argc, char** argv) {
    std::size_t reverse = 0;
    bool garbage = false, error = false, bad_energy = false, quit = false;
    double sleep_s = 0.0;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a == "--reverse" && k + 1 < argc) reverse = std::strtoul(argv[++k], nullptr, 10);
        else if (a == "--garbage") garbage = true;
        else if (a == "--error") error = true;
        else if (a == "--bad-energy") bad_energy = true;
        else if (a == "--sleep" && k + 1 < argc) sleep_s = std::atof(argv[++k]);
        else if (a == "--exit") quit = true;
    }
    if (quit) return 0;

    qafem::ExhaustiveSampler sampler;
    std::vector<std::string> queue;
    auto answer = [&](const std::string& line) {
        const auto req = nlohmann::json::parse(line);
        nlohmann::json rsp;
        rsp["id"] = req["id"];
        if (error) {
            rsp["error"] = "sampler offline";
        } else {
            qafem::QuboProblem p;
            p.size = req["n"].get<std::size_t>();
            for (const auto& e : req["entries"]) p.add(e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>());
            p.num_reads = req.value("num_reads", 1);
            p.seed = req.value("seed", std::uint64_t{0});
            const auto best = sampler.sample(p).best();
            std::vector<int> bits(best.bits.begin(), best.bits.end());
            rsp["sample"] = bits;
            rsp["energy"] = bad_energy ? best.energy + 1.0 : best.energy;
        }
        if (sleep_s > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
        if (garbage) {
            std::cout << "<<not json>>" << std::endl;
        } else {
            std::cout << rsp.dump() << std::endl;
        }
    };

    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        if (reverse > 1) {
            queue.push_back(line);
            if (queue.size() == reverse) {
                for (auto it = queue.rbegin(); it != queue.rend(); ++it) answer(*it);
                queue.clear();
            }
        } else {
            answer(line);
        }
    }
    return 0;
}
