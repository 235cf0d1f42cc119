from typing import FrozenSet, Sequence, Tuple

from royalty_sim.ledger.state import Address

OwnershipRecord = Tuple[Address, bool]


def reconstruct_h(history: Sequence[OwnershipRecord]) -> FrozenSet[Address]:
    """Rebuild H from the full ownership history.

    ``history`` lists one ``(owner, fee_paid)`` record per tenure, oldest first,
    ending with the current owner. H holds the distinct owners from the last
    fee payer (inclusive) up to the penultimate tenure, minus the current owner.
    """
    if not history:
        return frozenset()
    current, current_paid = history[-1]
    if current_paid:
        return frozenset()
    start = 0
    for index in range(len(history) - 2, -1, -1):
        if history[index][1]:
            start = index
            break
    return frozenset(owner for owner, _ in history[start:-1]) - {current}
