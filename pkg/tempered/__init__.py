"""
Project package for the tempered monotones toolkit.

Holds the shared settings and the exception hierarchy used by the
``linalg``, ``sdp``, ``states``, ``channels``, ``chmono`` and ``commands``
apps.
"""
