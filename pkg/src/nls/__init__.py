"""NLS: natural-language to Verilog generation workflow.

Core pieces: conversation sessions (`session`), the chat-completions wire
client (`provider`), the self-amending system prompt (`ledger`), code
extraction and packaging (`extract`), the Verilog/SystemVerilog lint
catalog (`hdl_lint`), and the RDE / resource-delta benchmarks (`bench`).
The `cli` module wires everything into the `nls` command.
"""

__version__ = "0.1.0"
