"""Simulator for an NFT royalty mechanism enforced by self-assessed value disclosure.

New owners either disclose a value x (paying the fee phi(x) and listing the
token at pi(x) for a window) or decline; historical owners who were not paid
through a disclosure may take the token back.
"""

__version__ = "0.1.0"
