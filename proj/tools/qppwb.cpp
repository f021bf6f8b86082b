#include <string>
#include <vector>

#include <qppwb/cli.hpp>

int main(int argc, char** argv)
{
    return qppwb::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
